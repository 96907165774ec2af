"""
Typed exceptions raised by the solver, the verifier and the file readers.

Every error derives from BlossomScaleError so callers can catch the whole
family at once.  The command line maps the families onto exit codes.
"""

from __future__ import annotations


class BlossomScaleError(Exception):
    """Base class of every error raised by this package."""


class DegreeViolation(BlossomScaleError):
    """An edge set gives some vertex more degree than its cap f(v)."""


class OverflowGuard(BlossomScaleError):
    """The instance is too large for 62-bit integer arithmetic."""


class Infeasible(BlossomScaleError):
    """The graph has no perfect matching or no f-factor."""


class ExpandOnPositiveZ(BlossomScaleError):
    """An expand step was requested for a blossom whose dual is positive."""


class TranslateDissolved(BlossomScaleError):
    """A unit translation was requested for a blossom that already dissolved."""


class InfeasibleAdjust(BlossomScaleError):
    """A dual adjustment would break near-domination or make z negative."""


class PassBoundExceeded(BlossomScaleError):
    """Phase 1 ran more passes than the instrumented bound allows."""


class SlotBoundExceeded(BlossomScaleError):
    """Phases 1 and 2 used more unit translations or time slots than allowed."""


class StructureViolation(BlossomScaleError):
    """An internal structural invariant of blossoms or expansions failed."""


class SizeLimit(BlossomScaleError):
    """A brute-force oracle was called on an instance that is too big."""


class ParseError(BlossomScaleError):
    """An instance or certificate file is malformed.

    The optional line number points at the offending line (1-based).
    """

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateDegreeLine(ParseError):
    """A vertex received two degree lines."""


class BadHeader(ParseError):
    """The problem line is missing or malformed."""
