"""Exception hierarchy shared across the package.

Every error raised by diffuselab derives from DiffuselabError, so callers can
catch one base class. Subclasses also inherit the closest builtin category
(ValueError, RuntimeError) to stay friendly to generic handlers.
"""

from __future__ import annotations


class DiffuselabError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(DiffuselabError, ValueError):
    """An argument is outside its documented domain."""


class DimensionError(DiffuselabError, ValueError):
    """Array shapes, grids, or time meshes do not line up."""


class ParseError(DiffuselabError, ValueError):
    """Field expression text could not be parsed.

    position is the 0-based character offset of the offending token.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class FieldEvalError(DiffuselabError, ArithmeticError):
    """A field expression hit a domain violation (log of a negative value,
    division by zero, ...) during evaluation.

    expression is the offending subexpression in source form, point the
    variable assignment that triggered it, and index the flat position within
    the batch for vectorized evaluation (None for scalar evaluation).
    """

    def __init__(self, message: str, expression: str, point: dict, index: int | None = None):
        at = ", ".join(f"{k}={v!r}" for k, v in point.items())
        super().__init__(f"{message} in '{expression}' at {at}")
        self.expression = expression
        self.point = point
        self.index = index


class SimulationError(DiffuselabError, RuntimeError):
    """A path simulation failed. Carries the step index and, when simulated
    inside an ensemble, the path id."""

    def __init__(self, message: str, step: int, path_id: int | None = None):
        where = f"step {step}" if path_id is None else f"path {path_id}, step {step}"
        super().__init__(f"{message} ({where})")
        self.step = step
        self.path_id = path_id


class StateOverflowError(SimulationError):
    """The simulated state left the trusted range (non-finite or huge)."""


class InstabilityError(DiffuselabError, RuntimeError):
    """A grid solver produced non-finite values; the time step is recorded."""

    def __init__(self, message: str, step: int):
        super().__init__(f"{message} (time step {step})")
        self.step = step


class NumericsError(DiffuselabError, RuntimeError):
    """A numerical routine (quadrature, fit) failed to converge."""


class ConfigError(DiffuselabError, ValueError):
    """An experiment configuration failed schema validation."""
