"""Exception types raised by the expression kernel and the engine."""

from __future__ import annotations

__all__ = [
    "ConslawError",
    "ExprError",
    "RuleError",
    "LeadingSolveError",
    "SubstitutionClassError",
    "TrivialSubstitutionError",
    "AnsatzError",
    "CancelledComputation",
]


class ConslawError(Exception):
    """Base class for all engine errors."""


class ExprError(ConslawError):
    """Malformed expression-level operation (bad power, bad division, ...)."""


class RuleError(ConslawError):
    """Rejected rewrite rule or rule set."""


class LeadingSolveError(ConslawError):
    """A system could not be put in leading-derivative (solved) form."""


class SubstitutionClassError(ConslawError):
    """A substitution lies outside the class an operation requires."""


class TrivialSubstitutionError(ConslawError):
    """All substitution components vanish on the solution manifold."""


class AnsatzError(ConslawError):
    """Ill-posed undetermined-coefficient problem."""


class CancelledComputation(ConslawError):
    """Cooperative cancellation: the configured deadline expired."""
