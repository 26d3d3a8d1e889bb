"""Exception types shared across the package."""

from __future__ import annotations


class CupCodesError(Exception):
    """Base class for all package errors."""


class InputError(CupCodesError, ValueError):
    """Malformed arguments, out-of-range grades, dimension mismatches, bad files."""


class PreconditionError(CupCodesError, ValueError):
    """Input is well-formed but violates a documented precondition."""


class InvariantError(CupCodesError, RuntimeError):
    """An internal consistency check failed."""


class ConstructionError(CupCodesError, RuntimeError):
    """A randomized construction could not satisfy its constraints."""


class UnsupportedGradeError(CupCodesError, KeyError):
    """A cup rule or tensor has no entry for the requested grades."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class NoNontrivialClassError(InputError):
    """Distance requested at a grade whose homology vanishes."""
