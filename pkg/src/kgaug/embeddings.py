"""Static word/phrase embedding table with unit-norm vectors.

Vectors are L2-normalized at load so that inner products are cosine similarities
in [-1, 1], which is what makes a fixed match threshold meaningful.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyTable, MalformedRow

logger = logging.getLogger(__name__)

_NORM_TOL = 1e-6


class EmbeddingTable:
    """Token -> unit vector map of one fixed dimension."""

    def __init__(self, dim: int, vectors: dict[str, np.ndarray], dropped: int = 0) -> None:
        self.dim = dim
        self.vectors = vectors
        self.dropped = dropped

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def get(self, token: str) -> np.ndarray | None:
        """Vector for a token, falling back to its lowercase form."""
        v = self.vectors.get(token)
        if v is None:
            v = self.vectors.get(token.lower())
        return v


def load_embeddings(source: IO[bytes] | IO[str] | str | Path) -> EmbeddingTable:
    """Parse `token v1 v2 ... vd` lines into a unit-normalized table.

    An optional leading `count dim` header line is accepted. Zero-norm vectors
    are dropped (counted on the returned table); later duplicates of a token
    are ignored.

    Raises:
        DimensionMismatch: rows disagree on dimension.
        EmptyTable: nothing usable was loaded.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_embeddings(fh)

    dim: int | None = None
    vectors: dict[str, np.ndarray] = {}
    dropped = 0
    first = True
    for n, raw in enumerate(source, start=1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        parts = line.split()
        if not parts:
            continue
        if first:
            first = False
            if len(parts) == 2 and all(_is_int(p) for p in parts):
                dim = int(parts[1])
                continue
        token, values = parts[0], parts[1:]
        if dim is None:
            dim = len(values)
        if len(values) != dim:
            raise DimensionMismatch(f"line {n}: expected {dim} values, got {len(values)}")
        try:
            vec = np.asarray([float(v) for v in values], dtype=np.float64)
        except ValueError as exc:
            raise MalformedRow(f"line {n}: non-numeric embedding value ({exc})") from exc
        scale = float(np.max(np.abs(vec)))
        if scale == 0.0:
            dropped += 1
            continue
        # scale by the largest component first so tiny magnitudes survive the
        # squaring inside the norm
        unit = vec / scale
        vectors.setdefault(token, unit / float(np.linalg.norm(unit)))

    if not vectors:
        raise EmptyTable("no nonzero embedding vectors found")
    if dropped:
        logger.warning("dropped %d zero-norm embedding vector(s)", dropped)
    return EmbeddingTable(dim or 0, vectors, dropped)


def _is_int(s: str) -> bool:
    try:
        int(s)
    except ValueError:
        return False
    return True


def embed_phrase(tokens: Sequence[str], table: EmbeddingTable) -> np.ndarray | None:
    """Unit vector for a phrase, or None when no constituent token is known.

    Prefers the underscore-joined phrase key; otherwise takes the L2-normalized
    mean of the known constituent vectors, skipping unknown tokens.
    """
    if not tokens:
        raise ValueError("phrase must be non-empty")
    joined = table.get("_".join(tokens))
    if joined is not None:
        return joined
    known = [v for t in tokens if (v := table.get(t)) is not None]
    if not known:
        return None
    mean = np.mean(known, axis=0)
    norm = float(np.linalg.norm(mean))
    if norm < _NORM_TOL:
        # opposing constituents cancel out; no usable direction
        return None
    return mean / norm
