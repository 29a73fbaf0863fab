"""In-memory knowledge graph: loading, validation, indices, 2-hop retrieval, perturbation.

The graph is immutable after load. Entities carry exactly one category; relational
triples are directed, but adjacency (and therefore neighborhood queries) treats
edges as undirected.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable, NamedTuple

from .errors import (
    DuplicateEntityCategory,
    InsufficientDiversity,
    MalformedRow,
    UnknownEntity,
    UnknownEntityInTriple,
)

RESERVED_CATEGORY_RELATION = "BelongTo"


def fold(s: str) -> str:
    """Length-preserving lowercase used for all case-insensitive matching."""
    return "".join(c if len(low := c.lower()) != 1 else low for c in s)


@dataclass(frozen=True, slots=True)
class Entity:
    """One graph entity: interned index, surface string, single category."""

    index: int
    canonical: str
    category: str


class Triple(NamedTuple):
    head: int
    relation: str
    tail: int


class KnowledgeGraph:
    """Entity/category/triple store with adjacency, category, and relation indices."""

    def __init__(self, entities: list[Entity], triples: Iterable[Triple]) -> None:
        self.entities: list[Entity] = entities
        self.by_canonical: dict[str, int] = {fold(e.canonical): e.index for e in entities}
        self.categories: tuple[str, ...] = tuple(sorted({e.category for e in entities}))
        self.triples: frozenset[Triple] = frozenset(triples)
        self.relations: tuple[str, ...] = tuple(sorted({t.relation for t in self.triples}))

        self.adjacency: dict[int, list[Triple]] = {e.index: [] for e in entities}
        self.by_relation: dict[str, list[Triple]] = {r: [] for r in self.relations}
        for t in sorted(self.triples):
            self.adjacency[t.head].append(t)
            self.adjacency[t.tail].append(t)
            self.by_relation[t.relation].append(t)
        self.by_category: dict[str, list[int]] = {c: [] for c in self.categories}
        for e in entities:
            self.by_category[e.category].append(e.index)

        self._two_hop_memo: dict[int, frozenset[Triple]] = {}

    # -- basic accessors --------------------------------------------------

    def __len__(self) -> int:
        return len(self.entities)

    def entity(self, index: int) -> Entity:
        if not 0 <= index < len(self.entities):
            raise UnknownEntity(f"no entity with index {index}")
        return self.entities[index]

    def lookup(self, canonical: str) -> int | None:
        """Entity index for a surface string (case-folded), or None."""
        return self.by_canonical.get(fold(canonical))

    def category_of(self, index: int) -> str:
        return self.entity(index).category

    def canonical_of(self, index: int) -> str:
        return self.entity(index).canonical

    def stats(self) -> dict[str, int]:
        return {
            "entities": len(self.entities),
            "categories": len(self.categories),
            "relations": len(self.relations),
            "triples": len(self.triples),
        }

    # -- neighborhood queries ---------------------------------------------

    def involved_triples(self, e: int) -> set[Triple]:
        """All triples with `e` as head or tail."""
        self._check(e)
        return set(self.adjacency[e])

    def adjacent_entities(self, e: int) -> set[int]:
        self._check(e)
        return {t.tail if t.head == e else t.head for t in self.adjacency[e]}

    def two_hop_candidates(self, e: int) -> set[Triple]:
        """Triples incident to `e` plus triples incident to each of its neighbors."""
        self._check(e)
        memo = self._two_hop_memo.get(e)
        if memo is None:
            out: set[Triple] = set(self.adjacency[e])
            for other in self.adjacent_entities(e):
                out.update(self.adjacency[other])
            memo = frozenset(out)
            self._two_hop_memo[e] = memo
        return set(memo)

    def same_category_candidates(self, e: int) -> set[int]:
        """Entities of e's category reachable as an endpoint within 2 hops, minus e."""
        self._check(e)
        cat = self.category_of(e)
        out: set[int] = set()
        for t in self.two_hop_candidates(e):
            for endpoint in (t.head, t.tail):
                if endpoint != e and self.entities[endpoint].category == cat:
                    out.add(endpoint)
        return out

    def _check(self, e: int) -> None:
        if not 0 <= e < len(self.entities):
            raise UnknownEntity(f"no entity with index {e}")


def triples_with_relation(candidates: Iterable[Triple], relation: str) -> set[Triple]:
    """Subset of `candidates` whose relation type equals `relation`."""
    return {t for t in candidates if t.relation == relation}


# -- loading ----------------------------------------------------------------


def _rows(source: IO[bytes] | IO[str] | str | Path) -> Iterable[tuple[int, str]]:
    """Yield (line_number, stripped_line) skipping blanks and # comments."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from _rows(fh)
        return
    for n, raw in enumerate(source, start=1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        line = line.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield n, line


def load_kg(
    entities_source: IO[bytes] | IO[str] | str | Path,
    triples_source: IO[bytes] | IO[str] | str | Path,
) -> KnowledgeGraph:
    """Build a validated graph from two tab-separated sources.

    entities rows: ``entity<TAB>category``; triples rows: ``head<TAB>relation<TAB>tail``.
    Duplicate (entity, category) rows and duplicate triples are deduplicated silently.

    Raises:
        MalformedRow: wrong column count, self-loop, or reserved relation name.
        DuplicateEntityCategory: one entity declared with two categories.
        UnknownEntityInTriple: triple endpoint never declared as an entity.
    """
    entities: list[Entity] = []
    index_of: dict[str, int] = {}
    for n, line in _rows(entities_source):
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise MalformedRow(f"entities row {n}: expected 'entity<TAB>category', got {line!r}")
        canonical, category = parts[0].strip(), parts[1].strip()
        key = fold(canonical)
        if key in index_of:
            prev = entities[index_of[key]]
            if prev.category != category:
                raise DuplicateEntityCategory(
                    f"entity {canonical!r} declared as both {prev.category!r} and {category!r}"
                )
            continue
        index_of[key] = len(entities)
        entities.append(Entity(len(entities), canonical, category))

    triples: set[Triple] = set()
    for n, line in _rows(triples_source):
        parts = line.split("\t")
        if len(parts) != 3 or not all(p.strip() for p in parts):
            raise MalformedRow(f"triples row {n}: expected 'head<TAB>relation<TAB>tail', got {line!r}")
        head_s, relation, tail_s = (p.strip() for p in parts)
        if relation == RESERVED_CATEGORY_RELATION:
            raise MalformedRow(
                f"triples row {n}: relation {RESERVED_CATEGORY_RELATION!r} is reserved; "
                "categories belong in the entities file"
            )
        head = index_of.get(fold(head_s))
        tail = index_of.get(fold(tail_s))
        if head is None or tail is None:
            missing = head_s if head is None else tail_s
            raise UnknownEntityInTriple(f"triples row {n}: undeclared entity {missing!r}")
        if head == tail:
            raise MalformedRow(f"triples row {n}: self-loop on {head_s!r}")
        triples.add(Triple(head, relation, tail))

    return KnowledgeGraph(entities, triples)


def write_kg(g: KnowledgeGraph, entities_path: str | Path, triples_path: str | Path) -> None:
    """Write a graph back to the tabular formats, canonically sorted."""
    with open(entities_path, "w", encoding="utf-8", newline="\n") as fh:
        for e in sorted(g.entities, key=lambda e: fold(e.canonical)):
            fh.write(f"{e.canonical}\t{e.category}\n")
    with open(triples_path, "w", encoding="utf-8", newline="\n") as fh:
        for t in sorted(g.triples, key=lambda t: (fold(g.canonical_of(t.head)), t.relation, fold(g.canonical_of(t.tail)))):
            fh.write(f"{g.canonical_of(t.head)}\t{t.relation}\t{g.canonical_of(t.tail)}\n")


# -- perturbation -------------------------------------------------------------


def _ceil_percent(n_percent: float, count: int) -> int:
    return math.ceil(Fraction(n_percent) * count / 100)


def perturb_kg(g: KnowledgeGraph, n_percent: float, seed: int) -> KnowledgeGraph:
    """Return a copy with n% of entity categories and n% of relation types randomized.

    Exactly ``ceil(n% * |entities|)`` entities get a different category and exactly
    ``ceil(n% * |triples|)`` triples get a different relation type, chosen uniformly
    among the alternatives. Entity and triple counts are preserved; the original
    graph is untouched. Deterministic for a fixed seed.
    """
    if not 0 <= n_percent <= 100:
        raise ValueError(f"n_percent must be in [0, 100], got {n_percent}")
    need_e = _ceil_percent(n_percent, len(g.entities))
    need_t = _ceil_percent(n_percent, len(g.triples))
    if n_percent > 0 and (len(g.categories) < 2 or len(g.relations) < 2):
        raise InsufficientDiversity(
            "perturbation needs at least 2 categories and 2 relation types "
            f"(have {len(g.categories)} and {len(g.relations)})"
        )

    rng = random.Random(seed)
    categories = list(g.categories)
    new_entities = list(g.entities)
    for idx in sorted(rng.sample(range(len(g.entities)), need_e)):
        old = new_entities[idx]
        alternatives = [c for c in categories if c != old.category]
        new_entities[idx] = Entity(old.index, old.canonical, rng.choice(alternatives))

    current = set(g.triples)
    order = sorted(g.triples)
    rng.shuffle(order)
    changed = 0
    for t in order:
        if changed == need_t:
            break
        # a redrawn relation must not collapse onto an existing triple, nor
        # resurrect an original one that an earlier redraw removed
        options = [
            r
            for r in g.relations
            if r != t.relation
            and Triple(t.head, r, t.tail) not in current
            and Triple(t.head, r, t.tail) not in g.triples
        ]
        if not options:
            continue
        current.remove(t)
        current.add(Triple(t.head, rng.choice(options), t.tail))
        changed += 1
    if changed < need_t:
        raise InsufficientDiversity(
            f"could only change {changed} of the required {need_t} relation types"
        )

    return KnowledgeGraph(new_entities, current)
