"""Shared exception types."""

from __future__ import annotations


class SketchSemError(Exception):
    """Base class for all library errors."""


class EmptyStroke(SketchSemError):
    """An operation that needs at least one point was given none."""


class UnknownCategory(SketchSemError):
    """A category id outside the 22-entry scheme (or a bad source label)."""


class SketchParseError(SketchSemError):
    """A sketch document failed validation; message carries field diagnostics."""


class ShapeError(SketchSemError):
    """Array shapes incompatible for the requested op."""


class EmptyRegion(SketchSemError):
    """A metric or reduction was asked for on an empty point/pixel set."""


class CheckpointError(SketchSemError):
    """A checkpoint file is malformed or does not match the model."""


class ConfigError(SketchSemError):
    """A config file or CLI flag combination is invalid."""


class CoincidentCentroids(UserWarning):
    """Two stroke centroids coincide; the relative angle is defined as 0."""
