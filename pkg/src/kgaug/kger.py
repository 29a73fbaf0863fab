"""Graph-neighborhood entity replacement (view 1).

Single mentions are swapped for a same-category entity drawn from their 2-hop
neighborhood; mentions linked by a graph relation are swapped together with the
endpoints of another triple of the same relation type, orientation preserved.
"""

from __future__ import annotations

import random

from .kg import KnowledgeGraph, Triple, fold
from .localize import MentionMatch, RelatedPair
from .records import KGER, AugmentedSample, LabeledText, Replacement, apply_replacements


def _pair_pool(pair: RelatedPair, g: KnowledgeGraph) -> list[Triple]:
    """Same-relation, category-preserving triples from the union of both 2-hop sets."""
    head, tail = pair.via_triple.head, pair.via_triple.tail
    head_cat, tail_cat = g.category_of(head), g.category_of(tail)
    candidates = g.two_hop_candidates(head) | g.two_hop_candidates(tail)
    pool = [
        t
        for t in candidates
        if t.relation == pair.relation
        and t != pair.via_triple
        and g.category_of(t.head) == head_cat
        and g.category_of(t.tail) == tail_cat
    ]
    pool.sort(key=lambda t: (fold(g.canonical_of(t.head)), fold(g.canonical_of(t.tail))))
    return pool


def _single_pool(entity: int, g: KnowledgeGraph) -> list[int]:
    pool = sorted(g.same_category_candidates(entity), key=lambda e: fold(g.canonical_of(e)))
    return pool


def augment_kger(
    origin: LabeledText,
    matches: list[MentionMatch],
    pairs: list[RelatedPair],
    g: KnowledgeGraph,
    rng: random.Random,
    count: int,
) -> list[AugmentedSample]:
    """Generate up to `count` distinct samples by replacing every replaceable mention.

    Each generated sample substitutes all mentions whose candidate pool is
    non-empty; pool members are cycled without replacement across samples, so
    duplicates only arise once a pool is exhausted. Samples whose text equals
    the origin are discarded.
    """
    paired_spans = {p.head_match.span for p in pairs} | {p.tail_match.span for p in pairs}
    slots: list[tuple] = []
    for pair_id, pair in enumerate(pairs):
        pool = _pair_pool(pair, g)
        if pool:
            rng.shuffle(pool)
            slots.append(("pair", pair_id, pair, pool))
    for match in matches:
        if match.span in paired_spans:
            continue
        pool = _single_pool(match.entity, g)
        if pool:
            rng.shuffle(pool)
            slots.append(("single", None, match, pool))
    if not slots:
        return []

    samples: list[AugmentedSample] = []
    seen_texts: set[str] = set()
    for s in range(count):
        replacements: list[Replacement] = []
        for kind, pair_id, item, pool in slots:
            choice = pool[s % len(pool)]
            if kind == "pair":
                replacements.append(
                    Replacement(item.head_match.span, item.head_match.entity, choice.head, pair_id, item.relation)
                )
                replacements.append(
                    Replacement(item.tail_match.span, item.tail_match.entity, choice.tail, pair_id, item.relation)
                )
            else:
                replacements.append(Replacement(item.span, item.entity, choice))
        text = apply_replacements(origin.text, replacements, g)
        if text == origin.text or text in seen_texts:
            continue
        seen_texts.add(text)
        samples.append(
            AugmentedSample(
                aug_id=f"{origin.id}:kger:{len(samples)}",
                origin_id=origin.id,
                text=text,
                label=origin.label,
                view=KGER,
                replacements=tuple(replacements),
            )
        )
    return samples


def validate_kger_sample(
    sample: AugmentedSample,
    origin: LabeledText,
    g: KnowledgeGraph,
) -> None:
    """Assert the view's invariants; raises AssertionError on violation."""
    assert sample.label == origin.label, "label must be preserved"
    assert apply_replacements(origin.text, sample.replacements, g) == sample.text
    by_pair: dict[int, list[Replacement]] = {}
    for rep in sample.replacements:
        assert g.category_of(rep.old_entity) == g.category_of(rep.new_entity), "category must be preserved"
        if rep.pair_id is None:
            endpoints = {t.head for t in g.two_hop_candidates(rep.old_entity)} | {
                t.tail for t in g.two_hop_candidates(rep.old_entity)
            }
            assert rep.new_entity in endpoints, "single replacement must stay within 2 hops"
        else:
            by_pair.setdefault(rep.pair_id, []).append(rep)
    for reps in by_pair.values():
        assert len(reps) == 2, "a pair must replace exactly two mentions"
        head_rep, tail_rep = reps
        assert head_rep.relation == tail_rep.relation
        certifying = Triple(head_rep.new_entity, head_rep.relation, tail_rep.new_entity)
        assert certifying in g.triples, "pair replacement must be certified by an existing triple"
