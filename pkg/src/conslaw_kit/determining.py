"""Determining-system residuals and E-decomposition.

Each operation evaluates the residual of one determining system: symmetry,
adjoint symmetry, differential substitution, multiplier, and the adjoint
invariance conditions that pick multipliers out of the adjoint symmetries.
The workhorse is `e_decompose`, which writes an expression exactly as

    original = sum M * D_J(E) + S

with S fully reduced on the solution manifold, by substituting each
leading derivative L = R + c^(-1) * <marker> and letting total derivatives
carry the marker's jet coordinates along.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cancel import checkpoint
from .expr.atoms import JetVar, MultiIndex, OpaqueDeriv
from .expr.errors import SubstitutionClassError, TrivialSubstitutionError
from .expr.expression import Expr, atom_expr, collect, substitute
from .expr.rules import RuleSet, as_ruleset
from .jet import PdeSystem, total_derivative_multi
from .variational import (Characteristic, _as_characteristic, adjoint_system,
                          adjoint_variables, euler, linearize,
                          adjoint_linearize)

__all__ = [
    "EDecomposition", "e_decompose", "symmetry_residual",
    "adjoint_symmetry_residual", "differential_substitution_residual",
    "selfadjoint_lambda", "multiplier_residual",
    "adjoint_invariance_conditions",
]


@dataclass(frozen=True)
class EDecomposition:
    """Exact split original = sum coeffs[(beta, J)] * D_J(E^beta) + S
    (+ terms of degree >= 2 in the equations, reported in `quadratic`
    still carrying marker atoms)."""

    system: PdeSystem
    coeffs: dict[tuple[int, MultiIndex], Expr]
    remainder: Expr
    quadratic: Expr
    marker_deps: tuple[str, ...]

    @property
    def is_linear(self) -> bool:
        return self.quadratic.is_zero

    def reassemble(self) -> Expr:
        """Substitute the actual equations back; must reproduce the input."""
        out = self.remainder
        for (b, J), m in sorted(self.coeffs.items(),
                                key=lambda kv: (kv[0][0], kv[0][1].sort_key())):
            out = out + m * total_derivative_multi(self.system.equations[b], J)
        if not self.quadratic.is_zero:
            binds = {}
            for a in self.quadratic.atoms():
                if isinstance(a, JetVar) and a.dep in self.marker_deps:
                    b = self.marker_deps.index(a.dep)
                    binds[a] = total_derivative_multi(self.system.equations[b],
                                                      a.index)
            out = out + substitute(self.quadratic, binds)
        return out


def _marker_names(sys: PdeSystem) -> tuple[str, ...]:
    used = set(sys.indep) | set(sys.dep)
    for eq in sys.equations:
        for a in eq.atoms():
            if isinstance(a, JetVar):
                used.add(a.dep)
            elif isinstance(a, OpaqueDeriv):
                used.add(a.func)
    names = []
    for i in range(len(sys.equations)):
        base = f"Emark{i + 1}"
        while base in used:
            base += "_"
        used.add(base)
        names.append(base)
    return tuple(names)


def e_decompose(e: Expr, sys: PdeSystem,
                rules: "RuleSet | Sequence" = ()) -> EDecomposition:
    """Separate on-solution content from equation-proportional content.

    Substitutes L^beta -> R^beta + c^(-1) * marker^beta (so that each
    equation maps exactly to its marker), reduces, and collects on marker
    monomials.  Degree-one buckets give the M coefficients, the constant
    bucket is the remainder S, and higher-degree buckets are reported as
    quadratic content.
    """
    rules = as_ruleset(rules)
    markers = _marker_names(sys)
    shadow = PdeSystem(
        sys.indep, sys.dep, sys.equations, sys.leading,
        tuple(r + Expr.from_coeff(c.invert_unit()) * atom_expr(JetVar(name))
              for r, c, name in zip(sys.solved, sys.lead_coeff, markers)),
        sys.lead_coeff, sys.eq_names)
    reduced = rules.reduce(shadow.reduce(e))
    checkpoint()

    marker_atoms = {a for a in reduced.atoms()
                    if isinstance(a, JetVar) and a.dep in markers}
    buckets = collect(reduced, marker_atoms)
    coeffs: dict[tuple[int, MultiIndex], Expr] = {}
    remainder = Expr.zero()
    quadratic = Expr.zero()
    for key, val in buckets.items():
        degree = sum(k for _, k in key)
        if degree == 0:
            remainder = val
        elif degree == 1:
            atom = key[0][0]
            b = markers.index(atom.dep)
            coeffs[(b, atom.index)] = val
        else:
            mono = Expr.const(1)
            for a, k in key:
                mono = mono * atom_expr(a) ** k
            quadratic = quadratic + mono * val
    return EDecomposition(sys, coeffs, remainder, quadratic, markers)


def symmetry_residual(sys: PdeSystem, eta,
                      rules: "RuleSet | Sequence" = ()) -> tuple[Expr, ...]:
    """On-solution residual of the symmetry determining system; all
    components zero iff eta is a generalized symmetry characteristic."""
    rules = as_ruleset(rules)
    exprs, _ = linearize(sys, eta)
    return tuple(rules.reduce(sys.reduce(x)) for x in exprs)


def adjoint_symmetry_residual(sys: PdeSystem, omega,
                              rules: "RuleSet | Sequence" = ()) -> tuple[Expr, ...]:
    """On-solution residual of the adjoint determining system."""
    rules = as_ruleset(rules)
    exprs, _ = adjoint_linearize(sys, omega)
    return tuple(rules.reduce(sys.reduce(x)) for x in exprs)


def substitute_multiplier_vars(sys: PdeSystem, e: Expr, phi: Characteristic,
                               names: tuple[str, ...] | None = None) -> Expr:
    """Replace the adjoined variables and all their jet coordinates by the
    substitution's components and their total derivatives."""
    names = names or adjoint_variables(sys)
    binds = {}
    for a in e.atoms():
        if isinstance(a, JetVar) and a.dep in names:
            b = names.index(a.dep)
            binds[a] = total_derivative_multi(phi.components[b], a.index)
    return substitute(e, binds)


def differential_substitution_residual(sys: PdeSystem, phi,
                                       rules: "RuleSet | Sequence" = ()) -> tuple[Expr, ...]:
    """Residual of the determining system for substitutions that make the
    adjoint system hold on solutions.

    Computed independently of `adjoint_symmetry_residual` (adjoint system
    via the Euler operator, then substitution); the two must agree for
    every characteristic, which the test suite checks mechanically.
    """
    rules = as_ruleset(rules)
    phi = _as_characteristic(phi, len(sys.dep))
    if all(rules.reduce(sys.reduce(c)).is_zero for c in phi.components):
        raise TrivialSubstitutionError("trivial substitution")
    out = []
    for adj in adjoint_system(sys):
        sub = substitute_multiplier_vars(sys, adj, phi)
        out.append(rules.reduce(sys.reduce(sub)))
    return tuple(out)


def selfadjoint_lambda(sys: PdeSystem, phi,
                       rules: "RuleSet | Sequence" = ()):
    """Factor matrix for point substitutions: (E^alpha)*|_{v=phi} =
    lambda_alpha^beta E^beta.

    `phi` may depend on the independent and dependent variables only.
    Returns the matrix lambda[alpha][beta]; raises if the substituted
    adjoint system has on-solution remainder ("not nonlinearly self-adjoint
    with point substitution") or derivative/quadratic equation content
    ("requires differential substitution").
    """
    rules = as_ruleset(rules)
    phi = _as_characteristic(phi, len(sys.dep))
    for c in phi.components:
        if c.jet_order() > 0:
            raise SubstitutionClassError(
                "requires differential substitution (component depends on "
                "derivatives)")
    if all(rules.reduce(sys.reduce(c)).is_zero for c in phi.components):
        raise TrivialSubstitutionError("trivial substitution")
    m = len(sys.dep)
    lam = [[Expr.zero()] * m for _ in range(m)]
    for a, adj in enumerate(adjoint_system(sys)):
        sub = substitute_multiplier_vars(sys, adj, phi)
        dec = e_decompose(sub, sys, rules)
        if not dec.is_linear:
            raise SubstitutionClassError(
                "requires differential substitution (nonlinear in E)")
        if not dec.remainder.is_zero:
            raise SubstitutionClassError(
                "not nonlinearly self-adjoint with point substitution")
        for (b, J), coeff in dec.coeffs.items():
            if J.order:
                raise SubstitutionClassError(
                    "requires differential substitution (derivative of E "
                    "survives)")
            lam[a][b] = coeff
    return lam


def multiplier_residual(sys: PdeSystem, lam,
                        rules: "RuleSet | Sequence" = ()) -> tuple[Expr, ...]:
    """Euler derivatives of Lambda_beta E^beta, one per dependent variable,
    NOT reduced on solutions (multipliers must work for arbitrary u)."""
    rules = as_ruleset(rules)
    lam = _as_characteristic(lam, len(sys.dep))
    combined = Expr.zero()
    for c, eq in zip(lam.components, sys.equations):
        combined = combined + c * eq
    return tuple(rules.reduce(euler(combined, d)) for d in sys.dep)


def adjoint_invariance_conditions(sys: PdeSystem, lam,
                                  rules: "RuleSet | Sequence" = ()):
    """Split each multiplier residual into its adjoint-symmetry part and
    the extra conditions a multiplier must additionally satisfy.

    Returns (adjoint_parts, extras): adjoint_parts[sigma] is the reduced
    remainder (and provably equals the adjoint-symmetry residual), extras
    is a list of ((sigma, beta, J), coefficient) for every surviving
    equation-proportional coefficient.
    """
    rules = as_ruleset(rules)
    lam = _as_characteristic(lam, len(sys.dep))
    residuals = multiplier_residual(sys, lam, rules)
    reference = adjoint_symmetry_residual(sys, lam, rules)
    adjoint_parts: list[Expr] = []
    extras: list[tuple[tuple[int, int, MultiIndex], Expr]] = []
    for sigma, res in enumerate(residuals):
        dec = e_decompose(res, sys, rules)
        if dec.remainder != reference[sigma]:
            raise ArithmeticError(
                "internal inconsistency: multiplier-residual remainder does "
                "not match the adjoint-symmetry residual")
        adjoint_parts.append(dec.remainder)
        for (b, J), coeff in sorted(dec.coeffs.items(),
                                    key=lambda kv: (kv[0][0], kv[0][1].sort_key())):
            extras.append(((sigma, b, J), coeff))
    return tuple(adjoint_parts), extras
