"""Exception hierarchy.

Each error also derives from the builtin it refines, so callers that only
catch ``ValueError`` or ``RuntimeError`` keep working.
"""


class CdiForgeError(Exception):
    """Base class for all package errors."""


class VolumeError(CdiForgeError, ValueError):
    """Bad volume dimensions, dimension mismatch, or non-finite data."""


class FormatError(CdiForgeError, ValueError):
    """A CDIV, CDNW or manifest file could not be parsed."""


class ConfigError(CdiForgeError, ValueError):
    """A run configuration is malformed or contains unknown keys."""


class GenerationError(CdiForgeError, RuntimeError):
    """Crystal synthesis could not produce an acceptable sample."""


class ConvergenceError(CdiForgeError, RuntimeError):
    """An iterative solver reached an invalid state."""

    def __init__(self, message: str, iteration: int) -> None:
        super().__init__(f"{message} (iteration {iteration})")
        self.iteration = iteration


class BenchmarkError(CdiForgeError, RuntimeError):
    """The benchmark could not run or its ordering contract failed."""
