"""Exception hierarchy shared by all tempocave modules."""


class TempocaveError(Exception):
    """Base class for all errors raised by this package."""


# --- dataset format / loading ---------------------------------------------

class MalformedDocument(TempocaveError):
    """A file could not be parsed at all (bad JSON, bad CSV row, bad encoding)."""


class SchemaViolation(TempocaveError):
    """A parsed document is missing a field or a field has the wrong type."""


class InvariantViolation(TempocaveError):
    """Parsed data violates a structural invariant of the dataset model."""


class MissingFile(TempocaveError):
    """A required file or directory is absent."""


# --- metrics ----------------------------------------------------------------

class EmptySeries(TempocaveError):
    """An affiliation series with zero frames was supplied."""


class NegativeThreshold(TempocaveError):
    """An edge-filter threshold below zero was supplied."""


class UnknownNode(TempocaveError):
    """A node id outside [0, num_nodes) was supplied."""


class FrameOutOfRange(TempocaveError):
    """A frame index outside [0, num_frames) was supplied."""


# --- comparison -------------------------------------------------------------

class EmptyIntersection(TempocaveError):
    """Two datasets share no node labels, so they cannot be aligned."""


class LengthMismatch(TempocaveError):
    """Two partitions of different sizes were supplied."""


class TooFewNodes(TempocaveError):
    """Partition agreement needs at least two elements."""


class EmptyAlignment(TempocaveError):
    """A node alignment with no matched pairs was supplied."""


# --- bundling / synthesis ---------------------------------------------------

class DegenerateSegment(TempocaveError):
    """A zero-length segment has no direction, so compatibility is undefined."""


class MissingPosition(TempocaveError):
    """An edge endpoint has no position in the supplied layout."""


class InvalidParams(TempocaveError):
    """A parameter object violates its declared constraints."""


# --- playback service --------------------------------------------------------

class InvalidCommand(TempocaveError):
    """A playback command is malformed (unknown action or missing value)."""


class JumpOutOfRange(TempocaveError):
    """A jump command targeted a frame outside [0, T)."""


class InvalidSpeed(TempocaveError):
    """A speed multiplier outside the supported set was requested."""


class PortInUse(TempocaveError):
    """The requested server port is already bound."""
