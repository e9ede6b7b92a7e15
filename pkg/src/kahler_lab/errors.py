"""Exception hierarchy shared across the laboratory."""

from __future__ import annotations


class LabError(Exception):
    """Base class for all laboratory failures."""


class ParameterError(LabError, ValueError):
    """Invalid argument, configuration key, or out-of-range index."""


class UnsupportedModelError(LabError):
    """Operation not defined for the requested background model."""


class NotKahlerError(LabError):
    """A candidate potential fails metric positivity.

    Carries the first offending grid node and the violating value so callers
    can report where admissibility broke.
    """

    def __init__(self, message: str, node: int, value: float):
        super().__init__(f"{message} (node {node}, value {value:.6e})")
        self.node = node
        self.value = value


class PathBrokenError(LabError):
    """An interpolation path left the space of metrics at parameter s."""

    def __init__(self, s: float):
        super().__init__(f"path leaves the positive cone at s = {s:.6f}")
        self.s = s


class SolverError(LabError):
    """A nonlinear solve failed to reach the requested residual."""

    def __init__(self, message: str, t: float | None = None, residual: float | None = None):
        super().__init__(message)
        self.t = t
        self.residual = residual


class GeneratorError(LabError):
    """The positivity-improving generator failed to certify its output."""

    def __init__(self, message: str, achieved_min: float):
        super().__init__(f"{message} (achieved minimum {achieved_min:.6e})")
        self.achieved_min = achieved_min
