"""Exception hierarchy shared across the engine."""


class WorldgenError(Exception):
    """Base class for all engine errors."""


class SchemaError(WorldgenError):
    """A document is structurally malformed (wrong types, missing keys)."""


class ValidationError(WorldgenError):
    """A well-formed document violates a semantic invariant."""


class AmbiguousDoorway(WorldgenError):
    """A doorway segment matches zero or three-or-more room boundaries."""


class OrphanAsset(WorldgenError):
    """An asset box's centroid lies inside no room polygon."""


class UnparseablePrompt(WorldgenError):
    """Strict-mode prompt parsing found no recognizable token."""


class InvalidLevel(WorldgenError):
    """Difficulty level below 1."""


class LayoutFailure(WorldgenError):
    """Floor-plan synthesis could not realize the graph's spanning tree."""


class DegenerateInput(WorldgenError):
    """Geometric input too degenerate to process (e.g. collinear hull points)."""


class ManifestError(WorldgenError):
    """A model manifest file is invalid; carries the offending path."""


class DuplicateId(WorldgenError):
    """Two model manifests declare the same id."""


class NoMatch(WorldgenError):
    """A database query matched no record after hard filters."""


class NoFreeSpace(WorldgenError):
    """Rejection sampling found no free point within the attempt budget."""


class CorruptBundle(WorldgenError):
    """A persisted world bundle failed to read back; names the first bad file."""


class InvalidRequest(WorldgenError):
    """A generation request is malformed (e.g. zero or two input variants)."""
