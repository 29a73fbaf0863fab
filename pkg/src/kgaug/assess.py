"""Confidence-centered quality assessment and sample selection.

Selection weights favor samples whose scored probability of the true label sits
near a target delta: confident enough to trust the label, not so confident that
the sample teaches the model nothing new.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import EmptyInput, MalformedRow, MissingConfidence
from .records import AugmentedSample


class Strategy(str, Enum):
    DELTA_K = "delta-k"
    TOP_K = "top-k"
    RANDOM = "random"
    ALL = "all"


@dataclass(frozen=True, slots=True)
class ConfidenceRecord:
    aug_id: str
    prob_true_label: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.prob_true_label <= 1.0:
            raise ValueError(f"probability out of [0, 1]: {self.prob_true_label}")


@dataclass(frozen=True, slots=True)
class SelectionConfig:
    delta: float = 0.75
    per_origin: int = 5
    strategy: Strategy = Strategy.DELTA_K


def sampling_weights(probs: Sequence[float], delta: float) -> list[float]:
    """softmax(1 - |delta - p|) over the given probabilities.

    Stabilized by max-subtraction, which cannot change the result (softmax is
    shift-invariant); the weights sum to 1 within 1e-12.
    """
    if len(probs) == 0:
        raise EmptyInput("need at least one probability")
    xi = 1.0 - np.abs(delta - np.asarray(probs, dtype=np.float64))
    exps = np.exp(xi - xi.max())
    return [float(w) for w in exps / exps.sum()]


def weighted_draw_without_replacement(
    items: Sequence, weights: Sequence[float], k: int, rng: random.Random
) -> list:
    """Draw up to k distinct items, renormalizing weights after each draw."""
    remaining = list(range(len(items)))
    w = [float(x) for x in weights]
    out = []
    for _ in range(min(k, len(remaining))):
        total = sum(w[i] for i in remaining)
        r = rng.random() * total
        acc = 0.0
        chosen_pos = len(remaining) - 1
        for pos, i in enumerate(remaining):
            acc += w[i]
            if r < acc:
                chosen_pos = pos
                break
        out.append(items[remaining.pop(chosen_pos)])
    return out


def select(
    augs: list[AugmentedSample],
    confs: list[ConfidenceRecord],
    cfg: SelectionConfig,
    rng_for_origin,
) -> list[AugmentedSample]:
    """Pick up to `per_origin` samples per origin under the configured strategy.

    `rng_for_origin` maps an origin id to a seeded random.Random so origins can
    be processed independently and reproducibly.

    Raises:
        MissingConfidence: some augmented sample has no confidence record.
    """
    if cfg.per_origin < 1:
        raise ValueError(f"per_origin must be positive, got {cfg.per_origin}")
    prob_of = {c.aug_id: c.prob_true_label for c in confs}
    missing = [a.aug_id for a in augs if a.aug_id not in prob_of]
    if missing:
        raise MissingConfidence(f"no confidence record for {missing[:5]}{'...' if len(missing) > 5 else ''}")

    groups: dict[str, list[AugmentedSample]] = {}
    for a in augs:
        groups.setdefault(a.origin_id, []).append(a)

    selected: list[AugmentedSample] = []
    for origin_id in sorted(groups):
        group = sorted(groups[origin_id], key=lambda a: a.aug_id)
        k = cfg.per_origin
        if cfg.strategy is Strategy.ALL:
            selected.extend(group)
            continue
        if cfg.strategy is Strategy.TOP_K:
            ranked = sorted(group, key=lambda a: (-prob_of[a.aug_id], a.aug_id))
            selected.extend(ranked[:k])
            continue
        rng = rng_for_origin(origin_id)
        if cfg.strategy is Strategy.RANDOM:
            chosen = rng.sample(group, min(k, len(group)))
            selected.extend(sorted(chosen, key=lambda a: a.aug_id))
            continue
        weights = sampling_weights([prob_of[a.aug_id] for a in group], cfg.delta)
        chosen = weighted_draw_without_replacement(group, weights, k, rng)
        selected.extend(sorted(chosen, key=lambda a: a.aug_id))
    return selected


# -- scorer interface files ----------------------------------------------------


def write_scoring_requests(samples: Iterable[AugmentedSample], path: str | Path) -> None:
    """One `{augId, text, label}` record per line, for any external scorer."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in samples:
            fh.write(json.dumps({"augId": s.aug_id, "text": s.text, "label": s.label}, ensure_ascii=False))
            fh.write("\n")


def read_confidences(source: IO[str] | str | Path) -> list[ConfidenceRecord]:
    """Parse `{augId, probTrueLabel}` records produced by a scorer."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return read_confidences(fh)
    out: list[ConfidenceRecord] = []
    for n, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRow(f"confidence line {n}: invalid JSON ({exc})") from exc
        if "augId" not in record or "probTrueLabel" not in record:
            raise MalformedRow(f"confidence line {n}: need augId and probTrueLabel")
        try:
            out.append(ConfidenceRecord(str(record["augId"]), float(record["probTrueLabel"])))
        except ValueError as exc:
            raise MalformedRow(f"confidence line {n}: {exc}") from exc
    return out
