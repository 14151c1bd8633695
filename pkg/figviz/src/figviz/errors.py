"""Exception hierarchy shared across the package.

Every error raised by figviz derives from FigvizError, so callers can catch
one base class. Subclasses also inherit the closest builtin category to stay
friendly to generic handlers.
"""

from __future__ import annotations


class FigvizError(Exception):
    """Base class for all errors raised by this package."""


class JobError(FigvizError, ValueError):
    """A render job document is malformed or names an unknown plot kind."""


class DataError(FigvizError, ValueError):
    """An input table is missing, has the wrong columns, or carries no rows."""
