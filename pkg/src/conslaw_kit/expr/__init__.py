"""Canonical-form symbolic expression kernel."""

from .atoms import (Atom, ExpAtom, ExpConst, IndependentVar, JetVar,
                    MultiIndex, OpaqueDeriv, Parameter)
from .coeff import Coeff, Poly
from .errors import (AnsatzError, CancelledComputation, ConslawError,
                     ExprError, LeadingSolveError, RuleError,
                     SubstitutionClassError, TrivialSubstitutionError)
from .expression import (Expr, Term, atom_expr, collect, exp_of, ivar, jet,
                         jet_atom, normalize, opaque, opaque_atom, param,
                         partial, rational, substitute)
from .rules import RewriteRule, RuleSet, apply_rules, as_ruleset, is_zero

__all__ = [
    "Atom", "ExpAtom", "ExpConst", "IndependentVar", "JetVar", "MultiIndex",
    "OpaqueDeriv", "Parameter", "Coeff", "Poly", "Expr", "Term",
    "atom_expr", "collect", "exp_of", "ivar", "jet", "jet_atom", "normalize",
    "opaque", "opaque_atom", "param", "partial", "rational", "substitute",
    "RewriteRule", "RuleSet", "apply_rules", "as_ruleset", "is_zero",
    "ConslawError", "ExprError", "RuleError", "LeadingSolveError",
    "SubstitutionClassError", "TrivialSubstitutionError", "AnsatzError",
    "CancelledComputation",
]
