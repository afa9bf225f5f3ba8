"""conslaw-kit: symbolic verification and construction of conservation laws.

The engine works on jet space with exact rational-function coefficients:
PDE systems in leading-derivative form, total derivatives, the Euler
operator, linearizations and their formal adjoints, determining-system
residuals for symmetries / adjoint symmetries / multipliers / differential
substitutions, conserved vectors built from a formal Lagrangian, and an
exact linear solver for undetermined-coefficient problems.

The `jet` constructor for jet atoms lives in `conslaw_kit.expr`; the name
`conslaw_kit.jet` is the jet-space module.
"""

from .expr import (Atom, Coeff, ConslawError, ExpAtom, ExpConst, Expr,
                   ExprError, IndependentVar, JetVar, MultiIndex,
                   OpaqueDeriv, Parameter, Poly, RewriteRule, RuleSet, Term,
                   apply_rules, atom_expr, collect, exp_of, is_zero, ivar,
                   jet_atom, normalize, opaque, opaque_atom, param, partial,
                   rational, substitute)

__version__ = "0.1.0"
