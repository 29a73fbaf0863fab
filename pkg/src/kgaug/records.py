"""Dataset and augmented-sample records plus their line-delimited JSON formats."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import DuplicateId, MalformedRow
from .localize import TokenSpan

QA_SEPARATOR = "[SEP]"

KGER = "KGER"
TRAINER = "TrainER"


@dataclass(frozen=True, slots=True)
class LabeledText:
    id: str
    text: str
    label: str


@dataclass(frozen=True, slots=True)
class Replacement:
    """One substituted span: which entity went in for which, and under which pair."""

    span: TokenSpan
    old_entity: int
    new_entity: int
    pair_id: int | None = None
    relation: str | None = None
    source_origin: str | None = None  # donor text id, training-data view only


@dataclass(frozen=True, slots=True)
class AugmentedSample:
    aug_id: str
    origin_id: str
    text: str
    label: str
    view: str
    replacements: tuple[Replacement, ...] = field(default_factory=tuple)


def _iter_lines(source: IO[str] | str | Path) -> Iterator[tuple[int, str]]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from _iter_lines(fh)
        return
    for n, line in enumerate(source, start=1):
        if line.strip():
            yield n, line


def _parse_record(n: int, line: str, required: tuple[str, ...]) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRow(f"line {n}: invalid JSON ({exc})") from exc
    if not isinstance(record, dict):
        raise MalformedRow(f"line {n}: expected an object, got {type(record).__name__}")
    missing = [k for k in required if k not in record]
    if missing:
        raise MalformedRow(f"line {n}: missing field(s) {missing}")
    return record


def read_dataset(source: IO[str] | str | Path, mode: str = "classification") -> list[LabeledText]:
    """Read `{id, text, label}` records; QA mode reads `{id, question, answer, label}`.

    QA pairs are joined into one text with the literal `[SEP]` separator token.
    """
    out: list[LabeledText] = []
    seen: set[str] = set()
    required = ("id", "label", "text") if mode == "classification" else ("id", "label", "question", "answer")
    for n, line in _iter_lines(source):
        record = _parse_record(n, line, required)
        rid = str(record["id"])
        if rid in seen:
            raise DuplicateId(f"line {n}: duplicate id {rid!r}")
        seen.add(rid)
        if mode == "qa":
            text = f"{record['question']} {QA_SEPARATOR} {record['answer']}"
        else:
            text = str(record["text"])
        out.append(LabeledText(rid, text, str(record["label"])))
    return out


def write_dataset(records: Iterable[LabeledText], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(json.dumps({"id": r.id, "text": r.text, "label": r.label}, ensure_ascii=False))
            fh.write("\n")


def sample_to_record(sample: AugmentedSample, g) -> dict:
    replacements = []
    for rep in sample.replacements:
        entry = {"oldEntity": g.canonical_of(rep.old_entity), "newEntity": g.canonical_of(rep.new_entity)}
        if rep.relation is not None:
            entry["relation"] = rep.relation
        replacements.append(entry)
    return {
        "augId": sample.aug_id,
        "originId": sample.origin_id,
        "text": sample.text,
        "label": sample.label,
        "view": sample.view,
        "replacements": replacements,
    }


def write_augmented(samples: Iterable[AugmentedSample], path: str | Path, g) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in samples:
            fh.write(json.dumps(sample_to_record(s, g), ensure_ascii=False))
            fh.write("\n")


def read_augmented(source: IO[str] | str | Path) -> list[dict]:
    """Read augmented-sample records back as dicts (provenance stays serialized)."""
    out = []
    for n, line in _iter_lines(source):
        out.append(_parse_record(n, line, ("augId", "originId", "text", "label", "view")))
    return out


def apply_replacements(text: str, replacements: Iterable[Replacement], g) -> str:
    """Substitute each replacement span with the new entity's canonical string."""
    result = text
    for rep in sorted(replacements, key=lambda r: r.span.start, reverse=True):
        result = result[: rep.span.start] + g.canonical_of(rep.new_entity) + result[rep.span.end :]
    return result
