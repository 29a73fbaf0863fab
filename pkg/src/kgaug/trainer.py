"""Training-data entity replacement (view 2).

Mentions are masked by their categories to expose each text's expression
template; templates are clustered (TF-IDF + k-means) and replacement entities
are then drawn from texts with the same label but a different cluster, which
keeps labels consistent while injecting new expression/entity combinations.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass

import numpy as np

from .errors import EmptyCorpus, KTooLarge
from .kg import KnowledgeGraph, fold
from .localize import MentionMatch, RelatedPair
from .records import TRAINER, AugmentedSample, LabeledText, Replacement, apply_replacements

# placeholders like [disease or syndrome] stay single tokens
_TOKEN_RE = re.compile(r"\[[^\]]*\]|\S+")


@dataclass(frozen=True, slots=True)
class Template:
    """A text with every mention span masked by its entity category."""

    origin_id: str
    masked_text: str
    label: str


@dataclass(slots=True)
class ClusterModel:
    k: int
    centroids: np.ndarray
    assignment: dict[str, int]
    inertia: float


@dataclass(slots=True)
class ReplacementIndex:
    """Donor pools keyed by (label, category) for singles and (label, relation) for pairs."""

    by_label_category: dict[tuple[str, str], list[tuple[int, str, int]]]
    by_label_relation: dict[tuple[str, str], list[tuple[int, int, str, int]]]


def mask_template(
    origin: LabeledText,
    matches: list[MentionMatch],
    g: KnowledgeGraph,
) -> Template:
    """Replace each mention span with `[category]`, right to left so offsets hold."""
    text = origin.text
    for m in sorted(matches, key=lambda m: m.span.start, reverse=True):
        text = text[: m.span.start] + f"[{g.category_of(m.entity)}]" + text[m.span.end :]
    return Template(origin.id, text, origin.label)


def tfidf_vectors(templates: list[Template]) -> tuple[np.ndarray, list[str]]:
    """L2-normalized TF-IDF rows over whitespace tokens of the masked texts.

    tf is the raw term count; idf = ln((1+N)/(1+df)) + 1.
    """
    if not templates:
        raise EmptyCorpus("no templates to vectorize")
    docs = [_TOKEN_RE.findall(t.masked_text) for t in templates]
    vocab = sorted({tok for doc in docs for tok in doc})
    col = {tok: i for i, tok in enumerate(vocab)}
    n = len(docs)
    tf = np.zeros((n, len(vocab)))
    for row, doc in enumerate(docs):
        for tok in doc:
            tf[row, col[tok]] += 1.0
    df = np.count_nonzero(tf, axis=0)
    idf = np.log((1.0 + n) / (1.0 + df)) + 1.0
    weighted = tf * idf
    norms = np.linalg.norm(weighted, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return weighted / norms, vocab


def _kmeans_pp_init(vectors: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = vectors.shape[0]
    centroids = np.empty((k, vectors.shape[1]))
    centroids[0] = vectors[rng.integers(n)]
    dist_sq = np.sum((vectors - centroids[0]) ** 2, axis=1)
    for i in range(1, k):
        total = dist_sq.sum()
        if total <= 0.0:
            centroids[i] = vectors[rng.integers(n)]
        else:
            centroids[i] = vectors[rng.choice(n, p=dist_sq / total)]
        dist_sq = np.minimum(dist_sq, np.sum((vectors - centroids[i]) ** 2, axis=1))
    return centroids


def kmeans(
    vectors: np.ndarray,
    k: int,
    seed: int,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Lloyd's algorithm with k-means++ seeding and Euclidean distance.

    Stops after `max_iter` iterations or once the largest centroid shift drops
    below `tol`. Returns (centroids, labels, inertia).
    """
    n = vectors.shape[0]
    if not 1 <= k <= n:
        raise KTooLarge(f"k={k} must be in [1, {n}]")
    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(vectors, k, rng)
    labels = np.zeros(n, dtype=int)
    for _ in range(max_iter):
        dists = np.linalg.norm(vectors[:, None, :] - centroids[None, :, :], axis=2)
        labels = np.argmin(dists, axis=1)
        new_centroids = np.empty_like(centroids)
        for c in range(k):
            members = vectors[labels == c]
            if len(members) == 0:
                # adopt the point farthest from its centroid
                worst = int(np.argmax(np.min(dists, axis=1)))
                new_centroids[c] = vectors[worst]
                labels[worst] = c
            else:
                new_centroids[c] = members.mean(axis=0)
        shift = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids
        if shift < tol:
            break
    dists = np.linalg.norm(vectors[:, None, :] - centroids[None, :, :], axis=2)
    labels = np.argmin(dists, axis=1)
    inertia = float(np.sum(np.min(dists, axis=1) ** 2))
    return centroids, labels, inertia


def cluster_templates(
    vectors: np.ndarray,
    templates: list[Template],
    k: int,
    seed: int,
) -> ClusterModel:
    centroids, labels, inertia = kmeans(vectors, k, seed)
    assignment = {t.origin_id: int(c) for t, c in zip(templates, labels)}
    return ClusterModel(k, centroids, assignment, inertia)


def default_cluster_count(n_templates: int) -> int:
    """Corpus-size heuristic, capped so k never exceeds the template count."""
    return max(1, min(n_templates, 20, max(2, math.isqrt(n_templates // 2))))


def build_replacement_index(
    dataset: list[LabeledText],
    matches_by_origin: dict[str, list[MentionMatch]],
    pairs_by_origin: dict[str, list[RelatedPair]],
    cm: ClusterModel,
    g: KnowledgeGraph,
) -> ReplacementIndex:
    """Record every localized entity (and related pair) under its label keys."""
    by_cat: dict[tuple[str, str], list[tuple[int, str, int]]] = {}
    by_rel: dict[tuple[str, str], list[tuple[int, int, str, int]]] = {}
    for origin in dataset:
        cluster = cm.assignment[origin.id]
        seen: set[int] = set()
        for m in matches_by_origin.get(origin.id, []):
            if m.entity in seen:
                continue
            seen.add(m.entity)
            key = (origin.label, g.category_of(m.entity))
            by_cat.setdefault(key, []).append((m.entity, origin.id, cluster))
        for p in pairs_by_origin.get(origin.id, []):
            by_rel.setdefault((origin.label, p.relation), []).append(
                (p.via_triple.head, p.via_triple.tail, origin.id, cluster)
            )
    return ReplacementIndex(by_cat, by_rel)


def augment_trainer(
    origin: LabeledText,
    matches: list[MentionMatch],
    pairs: list[RelatedPair],
    idx: ReplacementIndex,
    cm: ClusterModel,
    g: KnowledgeGraph,
    rng: random.Random,
    count: int,
) -> list[AugmentedSample]:
    """Generate up to `count` samples from same-label, different-cluster donors."""
    origin_cluster = cm.assignment[origin.id]
    paired_spans = {p.head_match.span for p in pairs} | {p.tail_match.span for p in pairs}
    slots: list[tuple] = []
    for pair_id, pair in enumerate(pairs):
        head, tail = pair.via_triple.head, pair.via_triple.tail
        head_cat, tail_cat = g.category_of(head), g.category_of(tail)
        pool = [
            entry
            for entry in idx.by_label_relation.get((origin.label, pair.relation), [])
            if entry[3] != origin_cluster
            and not (entry[0] == head and entry[1] == tail)
            and g.category_of(entry[0]) == head_cat
            and g.category_of(entry[1]) == tail_cat
        ]
        if pool:
            pool = sorted(pool, key=lambda e: (fold(g.canonical_of(e[0])), fold(g.canonical_of(e[1])), e[2]))
            rng.shuffle(pool)
            slots.append(("pair", pair_id, pair, pool))
    for match in matches:
        if match.span in paired_spans:
            continue
        category = g.category_of(match.entity)
        pool = [
            entry
            for entry in idx.by_label_category.get((origin.label, category), [])
            if entry[2] != origin_cluster and entry[0] != match.entity
        ]
        if pool:
            pool = sorted(pool, key=lambda e: (fold(g.canonical_of(e[0])), e[1]))
            rng.shuffle(pool)
            slots.append(("single", None, match, pool))
    if not slots:
        return []

    samples: list[AugmentedSample] = []
    seen_texts: set[str] = set()
    for s in range(count):
        replacements: list[Replacement] = []
        for kind, pair_id, item, pool in slots:
            entry = pool[s % len(pool)]
            if kind == "pair":
                head_e, tail_e, donor, _ = entry
                replacements.append(
                    Replacement(item.head_match.span, item.head_match.entity, head_e, pair_id, item.relation, donor)
                )
                replacements.append(
                    Replacement(item.tail_match.span, item.tail_match.entity, tail_e, pair_id, item.relation, donor)
                )
            else:
                entity, donor, _ = entry
                replacements.append(Replacement(item.span, item.entity, entity, source_origin=donor))
        text = apply_replacements(origin.text, replacements, g)
        if text == origin.text or text in seen_texts:
            continue
        seen_texts.add(text)
        samples.append(
            AugmentedSample(
                aug_id=f"{origin.id}:trainer:{len(samples)}",
                origin_id=origin.id,
                text=text,
                label=origin.label,
                view=TRAINER,
                replacements=tuple(replacements),
            )
        )
    return samples


def validate_trainer_sample(
    sample: AugmentedSample,
    origin: LabeledText,
    origins_by_id: dict[str, LabeledText],
    cm: ClusterModel,
    g: KnowledgeGraph,
) -> None:
    """Assert the view's invariants; raises AssertionError on violation."""
    assert sample.label == origin.label
    assert apply_replacements(origin.text, sample.replacements, g) == sample.text
    for rep in sample.replacements:
        assert g.category_of(rep.old_entity) == g.category_of(rep.new_entity)
        assert rep.source_origin is not None
        donor = origins_by_id[rep.source_origin]
        assert donor.label == origin.label, "donor label must match"
        assert cm.assignment[donor.id] != cm.assignment[origin.id], "donor cluster must differ"
