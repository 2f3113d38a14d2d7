"""Exceptions for gk3shift."""

from __future__ import annotations


class Gk3ShiftError(Exception):
    """Base class for all errors raised by gk3shift."""


class ParseError(Gk3ShiftError):
    """Input text or JSON could not be parsed."""


class ConfigError(Gk3ShiftError):
    """Configuration file is missing keys or holds invalid values."""


class UnknownVertexError(Gk3ShiftError):
    """A vertex identifier is not part of the graph."""


class DuplicateIdentifierError(Gk3ShiftError):
    """A vertex or edge identifier is used twice."""


class NotDisjointCyclesError(Gk3ShiftError):
    """Some vertex lies on two distinct cycles."""


class EmptyClassError(Gk3ShiftError):
    """A partition class is empty."""


class NotAPartitionError(Gk3ShiftError):
    """The classes do not partition the edge fiber of the pivot."""


class NoIncomingEdgesError(Gk3ShiftError):
    """The pivot has an empty fiber in the direction being split."""


class InvalidAmalgamationError(Gk3ShiftError):
    """Merging the group and splitting it again does not give back the graph."""


class MoveReplayError(Gk3ShiftError):
    """A recorded move could not be replayed."""

    def __init__(self, index: int, message: str) -> None:
        """Initialize with the position of the failing move."""
        super().__init__(f"move {index}: {message}")
        self.index = index


class NotGK3Error(Gk3ShiftError):
    """The graph is not of Gelfand-Kirillov dimension three."""


class MixedCycleError(Gk3ShiftError):
    """A cycle is neither a source cycle nor a sink cycle."""


class NotInteriorError(Gk3ShiftError):
    """The vertex is not in the interior of a trail."""


class UnknownTrailError(Gk3ShiftError):
    """No trail with the given index."""


class SharedTrailError(Gk3ShiftError):
    """The trail runs through an interior vertex shared with other trails."""


class NotNormalFormError(Gk3ShiftError):
    """The graph is not a GK3 graph in normal form."""


class LengthMismatchError(Gk3ShiftError):
    """Matched cycles have different lengths."""


class SinkVertexError(Gk3ShiftError):
    """A sink vertex cannot flow."""


class KeyAbsentError(Gk3ShiftError):
    """The monoid element has no unit at the requested key."""


class NotEssentialError(Gk3ShiftError):
    """The graph has a source or a sink."""


class LevelTooLowError(Gk3ShiftError):
    """The requested level is below the highest shift of the element."""


class LimitExceededError(Gk3ShiftError):
    """A configured search or size limit was exceeded."""


class DimensionMismatchError(Gk3ShiftError):
    """Matrix dimensions do not compose."""


class AlignmentError(Gk3ShiftError):
    """Solved offsets did not produce isomorphic aligned graphs."""
