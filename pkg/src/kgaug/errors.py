"""Exception types shared across the package."""


class KgaugError(Exception):
    """Base class for all errors raised by this package."""


class MalformedRow(KgaugError):
    """An input row does not match the expected tabular schema."""


class UnknownEntityInTriple(KgaugError):
    """A triple references an entity that was never declared."""


class DuplicateEntityCategory(KgaugError):
    """The same entity was declared with two distinct categories."""


class UnknownEntity(KgaugError):
    """A query referenced an entity not present in the graph."""


class InsufficientDiversity(KgaugError):
    """Perturbation requested but the graph has too few categories or relations."""


class DimensionMismatch(KgaugError):
    """Embedding rows disagree on vector dimensionality."""


class EmptyTable(KgaugError):
    """No usable embedding vectors were loaded."""


class EmptyCorpus(KgaugError):
    """Vectorization requested over zero documents."""


class KTooLarge(KgaugError):
    """More clusters requested than there are points."""


class EmptyInput(KgaugError):
    """An operation that needs at least one value received none."""


class MissingConfidence(KgaugError):
    """An augmented sample has no matching confidence record."""


class DuplicateId(KgaugError):
    """Two dataset records share the same id."""
