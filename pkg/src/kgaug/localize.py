"""Entity localization: dictionary-aware tokenization and mention-to-entity matching.

A mention is linked to a graph entity either by exact string match on its lemma
(score 1.0) or, failing that, by the highest embedding inner product when it
clears the threshold. Graph entity strings act as an extra tokenizer dictionary
so multi-word terms survive segmentation intact.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .embeddings import EmbeddingTable, embed_phrase
from .errors import MalformedRow
from .kg import KnowledgeGraph, Triple, fold

DEFAULT_STOPWORDS = frozenset(
    """a an the and or but if then else of to in on at by for from with without as is are am
    was were be been being do does did have has had having will would can could should may
    might must it its this that these those i you he she we they me him her us them my your
    his our their what which who whom when where why how not no nor so too very own same
    than s t don now""".split()
)


@dataclass(frozen=True, slots=True)
class TokenSpan:
    """A token's offsets into the original text plus its canonical form."""

    start: int
    end: int
    surface: str
    lemma: str


@dataclass(frozen=True, slots=True)
class MentionMatch:
    span: TokenSpan
    entity: int
    score: float


@dataclass(frozen=True, slots=True)
class RelatedPair:
    """Two mentions in one text whose entities are directly linked in the graph."""

    head_match: MentionMatch
    tail_match: MentionMatch
    relation: str
    via_triple: Triple


def load_lemma_table(source: IO[str] | str | Path) -> dict[str, str]:
    """Read `form<TAB>lemma` rows into a case-folded lookup table."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_lemma_table(fh)
    table: dict[str, str] = {}
    for n, line in enumerate(source, start=1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise MalformedRow(f"lemma row {n}: expected 'form<TAB>lemma', got {line!r}")
        table[fold(parts[0].strip())] = parts[1].strip()
    return table


def load_stopwords(source: IO[str] | str | Path) -> frozenset[str]:
    """Read one token per line; replaces the built-in default list."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_stopwords(fh)
    return frozenset(fold(line.strip()) for line in source if line.strip())


# -- tokenization -------------------------------------------------------------


def _is_cjk(ch: str) -> bool:
    code = ord(ch)
    return (
        0x3400 <= code <= 0x4DBF
        or 0x4E00 <= code <= 0x9FFF
        or 0xF900 <= code <= 0xFAFF
        or 0x3040 <= code <= 0x30FF  # kana
        or 0xAC00 <= code <= 0xD7AF  # hangul
    )


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def _bound_forming(ch: str) -> bool:
    # only non-CJK word characters demand a word boundary around dictionary hits
    return _is_word_char(ch) and not _is_cjk(ch)


_TRIE_CACHE: "weakref.WeakKeyDictionary[KnowledgeGraph, dict]" = weakref.WeakKeyDictionary()
_END = "\0"


def _entity_trie(g: KnowledgeGraph) -> dict:
    trie = _TRIE_CACHE.get(g)
    if trie is None:
        trie = {}
        for key in g.by_canonical:
            node = trie
            for ch in key:
                node = node.setdefault(ch, {})
            node[_END] = True
        _TRIE_CACHE[g] = trie
    return trie


def _longest_dict_match(folded: str, start: int, trie: dict) -> int:
    """Length of the longest dictionary entry at `start` that ends on a word boundary."""
    node = trie
    best = 0
    i = start
    n = len(folded)
    while i < n:
        node = node.get(folded[i])
        if node is None:
            break
        i += 1
        if _END in node:
            after_ok = i >= n or not (_bound_forming(folded[i]) and _bound_forming(folded[i - 1]))
            if after_ok:
                best = i - start
    return best


def preprocess(
    text: str,
    g: KnowledgeGraph,
    lemma_table: dict[str, str] | None = None,
) -> list[TokenSpan]:
    """Segment text into token spans, giving graph entity strings precedence.

    Longest case-folded dictionary matches win over base tokenization; leftover
    text splits on whitespace/punctuation, with CJK characters falling back to
    single-character tokens. Each token is lemmatized by table lookup, keeping
    the surface form when no entry exists. Punctuation produces no spans.
    """
    lemma_table = lemma_table or {}
    trie = _entity_trie(g)
    folded = fold(text)
    spans: list[TokenSpan] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if not (i > 0 and _bound_forming(folded[i - 1]) and _bound_forming(folded[i])):
            length = _longest_dict_match(folded, i, trie)
            if length:
                spans.append(_make_span(text, folded, i, i + length, lemma_table))
                i += length
                continue
        if _is_cjk(ch):
            spans.append(_make_span(text, folded, i, i + 1, lemma_table))
            i += 1
        elif _is_word_char(ch):
            j = i + 1
            while j < n and _is_word_char(text[j]) and not _is_cjk(text[j]):
                j += 1
            spans.append(_make_span(text, folded, i, j, lemma_table))
            i = j
        else:
            i += 1  # punctuation delimits but yields no span
    return spans


def _make_span(text: str, folded: str, start: int, end: int, lemma_table: dict[str, str]) -> TokenSpan:
    surface = text[start:end]
    lemma = lemma_table.get(folded[start:end], surface)
    return TokenSpan(start, end, surface, lemma)


# -- matching -----------------------------------------------------------------


_MATRIX_CACHE: "weakref.WeakKeyDictionary[KnowledgeGraph, weakref.WeakKeyDictionary]" = (
    weakref.WeakKeyDictionary()
)


def entity_matrix(g: KnowledgeGraph, table: EmbeddingTable) -> tuple[list[int], np.ndarray]:
    """Embeddable entities (sorted by canonical string) and their stacked unit vectors."""
    per_graph = _MATRIX_CACHE.get(g)
    if per_graph is None:
        per_graph = weakref.WeakKeyDictionary()
        _MATRIX_CACHE[g] = per_graph
    cached = per_graph.get(table)
    if cached is None:
        ids: list[int] = []
        rows: list[np.ndarray] = []
        for e in sorted(g.entities, key=lambda e: fold(e.canonical)):
            vec = embed_phrase(e.canonical.split() or [e.canonical], table)
            if vec is not None:
                ids.append(e.index)
                rows.append(vec)
        matrix = np.vstack(rows) if rows else np.empty((0, table.dim))
        cached = (ids, matrix)
        per_graph[table] = cached
    return cached


def _is_numeric(token: str) -> bool:
    stripped = token.replace(".", "", 1).replace(",", "").replace("-", "", 1)
    return stripped.isdigit()


def localize(
    text: str,
    g: KnowledgeGraph,
    table: EmbeddingTable,
    lam: float = 0.9,
    *,
    lemma_table: dict[str, str] | None = None,
    stopwords: frozenset[str] | None = None,
    sim_match: bool = True,
) -> list[MentionMatch]:
    """Map token spans to graph entities by exact match or embedding similarity.

    Exact lemma matches (case-folded) short-circuit at score 1.0. Otherwise the
    span's phrase vector is compared against every embeddable entity and the
    argmax is emitted iff its similarity reaches `lam`; ties resolve to the
    lexicographically smallest canonical string. Stopwords and purely numeric
    tokens are never candidate mentions.
    """
    if not 0 < lam <= 1:
        raise ValueError(f"lambda must be in (0, 1], got {lam}")
    stops = DEFAULT_STOPWORDS if stopwords is None else stopwords
    ids, matrix = entity_matrix(g, table) if sim_match else ([], None)

    matches: list[MentionMatch] = []
    for span in preprocess(text, g, lemma_table):
        key = fold(span.lemma)
        if key in stops or _is_numeric(key):
            continue
        exact = g.by_canonical.get(key)
        if exact is not None:
            matches.append(MentionMatch(span, exact, 1.0))
            continue
        if not sim_match or not ids:
            continue
        vec = embed_phrase(span.lemma.split() or [span.lemma], table)
        if vec is None:
            continue
        sims = matrix @ vec
        best = int(np.argmax(sims))  # rows are canonically sorted, so ties pick the smallest
        score = float(sims[best])
        if score >= lam:
            matches.append(MentionMatch(span, ids[best], min(score, 1.0)))
    return matches


def find_related_pairs(matches: list[MentionMatch], g: KnowledgeGraph) -> list[RelatedPair]:
    """Greedy left-to-right pairing of mentions whose entities share a triple.

    Each mention joins at most one pair; among several connecting triples the
    lexicographically smallest (relation, head, tail) certifies the pair.
    """
    used = [False] * len(matches)
    pairs: list[RelatedPair] = []
    for i, left in enumerate(matches):
        if used[i]:
            continue
        for j in range(i + 1, len(matches)):
            if used[j]:
                continue
            right = matches[j]
            triple = _connecting_triple(left.entity, right.entity, g)
            if triple is None:
                continue
            if triple.head == left.entity:
                pairs.append(RelatedPair(left, right, triple.relation, triple))
            else:
                pairs.append(RelatedPair(right, left, triple.relation, triple))
            used[i] = used[j] = True
            break
    return pairs


def _connecting_triple(a: int, b: int, g: KnowledgeGraph) -> Triple | None:
    if a == b:
        return None
    connecting = [t for t in g.adjacency[a] if {t.head, t.tail} == {a, b}]
    if not connecting:
        return None
    return min(connecting, key=lambda t: (t.relation, t.head, t.tail))


def localized_entities(
    texts: Iterable[str],
    g: KnowledgeGraph,
    table: EmbeddingTable,
    lam: float = 0.9,
    **kwargs,
) -> set[int]:
    """Union of entities localized across a collection of texts."""
    out: set[int] = set()
    for text in texts:
        out.update(m.entity for m in localize(text, g, table, lam, **kwargs))
    return out
