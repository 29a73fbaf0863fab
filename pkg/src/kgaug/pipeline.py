"""End-to-end orchestration: load inputs, localize, augment, select, write outputs."""

from __future__ import annotations

import hashlib
import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path

from . import assess, kger, trainer
from .embeddings import EmbeddingTable, load_embeddings
from .errors import EmptyInput
from .kg import KnowledgeGraph, load_kg, perturb_kg, write_kg
from .localize import MentionMatch, RelatedPair, find_related_pairs, localize, localized_entities
from .records import (
    KGER,
    TRAINER,
    AugmentedSample,
    LabeledText,
    read_augmented,
    read_dataset,
    write_augmented,
    write_dataset,
)

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class RunConfig:
    lam: float = 0.9
    delta: float = 0.75
    per_origin: int = 5
    clusters: int | None = None
    seed: int = 0
    sim_match: bool = True
    use_kger: bool = True
    use_trainer: bool = True
    use_assess: bool = True
    mode: str = "classification"
    stopwords: frozenset[str] | None = None
    lemma_table: dict[str, str] | None = None

    def validate(self) -> None:
        if not 0 < self.lam <= 1:
            raise ValueError("lambda must be in (0, 1]")
        if not 0 < self.delta < 1:
            raise ValueError("delta must be in (0, 1)")
        if self.per_origin < 1:
            raise ValueError("per-origin must be positive")
        if not (self.use_kger or self.use_trainer):
            raise ValueError("at least one of the KGER/TrainER views must stay enabled")
        if self.mode not in ("classification", "qa"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def echo(self) -> dict:
        return {
            "lambda": self.lam,
            "delta": self.delta,
            "perOrigin": self.per_origin,
            "clusters": self.clusters if self.clusters is not None else "AUTO",
            "seed": self.seed,
            "simMatch": self.sim_match,
            "kger": self.use_kger,
            "trainer": self.use_trainer,
            "assess": self.use_assess,
            "mode": self.mode,
        }


def derive_rng(seed: int, *parts: str) -> random.Random:
    """Seeded RNG bound to a (seed, stream...) identity, stable across processes."""
    digest = hashlib.sha256(("\x1f".join((str(seed), *parts))).encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


@dataclass(slots=True)
class AugmentResult:
    samples: list[AugmentedSample]
    report: dict
    dataset: list[LabeledText]
    graph: KnowledgeGraph


def _localize_all(
    dataset: list[LabeledText],
    g: KnowledgeGraph,
    table: EmbeddingTable,
    cfg: RunConfig,
) -> tuple[dict[str, list[MentionMatch]], dict[str, list[RelatedPair]]]:
    matches_by_origin: dict[str, list[MentionMatch]] = {}
    pairs_by_origin: dict[str, list[RelatedPair]] = {}
    for origin in dataset:
        matches = localize(
            origin.text,
            g,
            table,
            cfg.lam,
            lemma_table=cfg.lemma_table,
            stopwords=cfg.stopwords,
            sim_match=cfg.sim_match,
        )
        matches_by_origin[origin.id] = matches
        pairs_by_origin[origin.id] = find_related_pairs(matches, g)
    return matches_by_origin, pairs_by_origin


def generate_candidates(
    dataset: list[LabeledText],
    g: KnowledgeGraph,
    table: EmbeddingTable,
    cfg: RunConfig,
) -> tuple[list[AugmentedSample], dict]:
    """Run both enabled views over every origin and pool their candidates.

    Each enabled view is asked for `per_origin` candidates per origin; the
    pooled set is what selection later samples from. Every emitted sample is
    re-validated against its view's invariants before being returned.
    """
    matches_by_origin, pairs_by_origin = _localize_all(dataset, g, table, cfg)
    origins_by_id = {o.id: o for o in dataset}

    cm = None
    idx = None
    cluster_report: dict = {}
    if cfg.use_trainer:
        templates = [mask for mask in (trainer.mask_template(o, matches_by_origin[o.id], g) for o in dataset)]
        vectors, _vocab = trainer.tfidf_vectors(templates)
        k = cfg.clusters if cfg.clusters is not None else trainer.default_cluster_count(len(templates))
        cm = trainer.cluster_templates(vectors, templates, k, cfg.seed)
        idx = trainer.build_replacement_index(dataset, matches_by_origin, pairs_by_origin, cm, g)
        sizes = [0] * cm.k
        for c in cm.assignment.values():
            sizes[c] += 1
        cluster_report = {"k": cm.k, "inertia": round(cm.inertia, 6), "sizes": sizes}

    samples: list[AugmentedSample] = []
    view_counts = {KGER: 0, TRAINER: 0}
    skipped: list[str] = []
    for origin in dataset:
        matches = matches_by_origin[origin.id]
        pairs = pairs_by_origin[origin.id]
        produced = []
        if cfg.use_kger:
            rng = derive_rng(cfg.seed, "kger", origin.id)
            kger_samples = kger.augment_kger(origin, matches, pairs, g, rng, cfg.per_origin)
            for s in kger_samples:
                kger.validate_kger_sample(s, origin, g)
            produced.extend(kger_samples)
        if cfg.use_trainer and cm is not None and idx is not None:
            rng = derive_rng(cfg.seed, "trainer", origin.id)
            trainer_samples = trainer.augment_trainer(origin, matches, pairs, idx, cm, g, rng, cfg.per_origin)
            for s in trainer_samples:
                trainer.validate_trainer_sample(s, origin, origins_by_id, cm, g)
            produced.extend(trainer_samples)
        if not produced:
            skipped.append(origin.id)
        for s in produced:
            view_counts[s.view] += 1
        samples.extend(produced)

    report = {
        "origins": len(dataset),
        "candidates": len(samples),
        "perView": view_counts,
        "skippedOrigins": skipped,
        "clusters": cluster_report,
    }
    if len(skipped) == len(dataset):
        logger.warning("no augmentable text: every origin yielded zero candidates")
        report["noAugmentableText"] = True
    return samples, report


def run_augment(
    cfg: RunConfig,
    kg_entities: str | Path,
    kg_triples: str | Path,
    embeddings_path: str | Path,
    dataset_path: str | Path,
    output_path: str | Path,
    requests_path: str | Path | None = None,
    report_path: str | Path | None = None,
    final_path: str | Path | None = None,
) -> AugmentResult:
    """Produce augmented samples and either scoring requests or a final training file.

    With assessment enabled the pooled candidates plus a scoring-request file
    are written and the run stops at the checkpoint (resume with the assess
    step once confidences exist). With assessment disabled, `per_origin`
    samples per origin are chosen uniformly and the final training file
    (originals + selections) is written immediately.
    """
    cfg.validate()
    g = load_kg(kg_entities, kg_triples)
    table = load_embeddings(embeddings_path)
    dataset = read_dataset(dataset_path, cfg.mode)
    if not dataset:
        raise EmptyInput(f"dataset {dataset_path} holds no records")

    candidates, report = generate_candidates(dataset, g, table, cfg)
    report = {"config": cfg.echo(), **report}

    output_path = Path(output_path)
    if cfg.use_assess:
        write_augmented(candidates, output_path, g)
        requests_path = Path(requests_path) if requests_path else output_path.with_suffix(".requests.jsonl")
        assess.write_scoring_requests(candidates, requests_path)
        report["checkpoint"] = {"augmented": str(output_path), "requests": str(requests_path)}
    else:
        sel_cfg = assess.SelectionConfig(cfg.delta, cfg.per_origin, assess.Strategy.RANDOM)
        dummy_confs = [assess.ConfidenceRecord(s.aug_id, 0.0) for s in candidates]
        chosen = assess.select(candidates, dummy_confs, sel_cfg, lambda oid: derive_rng(cfg.seed, "select", oid))
        write_augmented(chosen, output_path, g)
        final_path = Path(final_path) if final_path else output_path.with_suffix(".final.jsonl")
        _write_final(dataset, chosen, final_path)
        report["selected"] = len(chosen)
        report["final"] = str(final_path)

    report_path = Path(report_path) if report_path else output_path.with_suffix(".report.json")
    _write_report(report, report_path)
    return AugmentResult(candidates, report, dataset, g)


def resume_assess(
    dataset_path: str | Path,
    augmented_path: str | Path,
    confidence_path: str | Path,
    output_path: str | Path,
    cfg: assess.SelectionConfig,
    seed: int,
    mode: str = "classification",
) -> list[AugmentedSample]:
    """Apply selection to scored candidates and write originals + selections."""
    dataset = read_dataset(dataset_path, mode)
    raw = read_augmented(augmented_path)
    augs = [
        AugmentedSample(r["augId"], r["originId"], r["text"], str(r["label"]), r["view"]) for r in raw
    ]
    confs = assess.read_confidences(confidence_path)
    chosen = assess.select(augs, confs, cfg, lambda oid: derive_rng(seed, "select", oid))
    if not chosen:
        logger.warning("selection produced no augmented samples; final file holds originals only")
    _write_final(dataset, chosen, Path(output_path))
    return chosen


def _write_final(dataset: list[LabeledText], chosen: list[AugmentedSample], path: Path) -> None:
    rows = list(dataset) + [LabeledText(s.aug_id, s.text, s.label) for s in chosen]
    write_dataset(rows, path)


def _write_report(report: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


# -- metrics and KG tooling ----------------------------------------------------


@dataclass(frozen=True, slots=True)
class CoverageResult:
    novel: int
    covered: int
    coverage: float
    novel_empty: bool


def novel_entity_coverage(
    train_path: str | Path,
    test_path: str | Path,
    augmented_path: str | Path,
    g: KnowledgeGraph,
    table: EmbeddingTable,
    lam: float = 0.9,
    *,
    mode: str = "classification",
    stopwords: frozenset[str] | None = None,
    lemma_table: dict[str, str] | None = None,
) -> CoverageResult:
    """Fraction of test-only entities that the augmented texts mention.

    By convention the coverage is 1.0 when the test set introduces no novel
    entities; the result flags that case separately.
    """
    kwargs = {"stopwords": stopwords, "lemma_table": lemma_table}
    train_entities = localized_entities((r.text for r in read_dataset(train_path, mode)), g, table, lam, **kwargs)
    test_entities = localized_entities((r.text for r in read_dataset(test_path, mode)), g, table, lam, **kwargs)
    aug_texts = [r["text"] for r in read_augmented(augmented_path)]
    aug_entities = localized_entities(aug_texts, g, table, lam, **kwargs)

    novel = test_entities - train_entities
    if not novel:
        return CoverageResult(0, 0, 1.0, True)
    covered = novel & aug_entities
    return CoverageResult(len(novel), len(covered), len(covered) / len(novel), False)


def perturb_kg_files(
    kg_entities: str | Path,
    kg_triples: str | Path,
    n_percent: float,
    seed: int,
    out_entities: str | Path,
    out_triples: str | Path,
) -> KnowledgeGraph:
    """Load, perturb, and write back a graph in the same tabular formats."""
    g = load_kg(kg_entities, kg_triples)
    perturbed = perturb_kg(g, n_percent, seed)
    write_kg(perturbed, out_entities, out_triples)
    return perturbed
