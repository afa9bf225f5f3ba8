"""Conserved vectors from the formal Lagrangian.

Assembles the components C^i from a symmetry generator and a differential
substitution, verifies D_i C^i = 0 on the solution manifold with an
explicit equation-proportional identity as evidence, and compares vectors
up to the equivalences that leave a conservation law unchanged (overall
sign, on-solution rewriting, divergence-free shifts).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .cancel import checkpoint
from .determining import (EDecomposition, differential_substitution_residual,
                          e_decompose, substitute_multiplier_vars)
from .expr.atoms import JetVar, MultiIndex
from .expr.errors import ExprError
from .expr.expression import Expr, atom_expr, jet_atom
from .expr.rules import RuleSet, as_ruleset
from .jet import PdeSystem, jet_partial, total_derivative
from .variational import Characteristic, _as_characteristic, adjoint_variables, formal_lagrangian

__all__ = [
    "Generator", "ConservedVector", "VerificationReport", "characteristic_W",
    "ibragimov_vector", "verify_divergence", "compare_vectors",
    "EquivalenceResult",
]


@dataclass(frozen=True)
class Generator:
    """Symmetry generator: xi components over the independent variables,
    eta components over the dependent variables (xi may be all zero for
    the evolutionary form)."""

    xi: tuple[Expr, ...]
    eta: tuple[Expr, ...]

    def __post_init__(self) -> None:
        if all(c.is_zero for c in self.xi) and all(c.is_zero for c in self.eta):
            raise ValueError("generator must have a nonzero component")

    @staticmethod
    def evolutionary(sys: PdeSystem, *eta: Expr) -> "Generator":
        return Generator(tuple(Expr.zero() for _ in sys.indep), tuple(eta))


def characteristic_W(sys: PdeSystem, g: Generator) -> Characteristic:
    """W^sigma = eta^sigma - sum_j xi^j u^sigma_j."""
    comps = []
    for sigma, d in enumerate(sys.dep):
        w = g.eta[sigma]
        for j, var in enumerate(sys.indep):
            if not g.xi[j].is_zero:
                w = w - g.xi[j] * atom_expr(jet_atom(d, var))
        comps.append(w)
    return Characteristic(tuple(comps))


@dataclass(frozen=True)
class VerificationReport:
    reduced_divergence: Expr
    decomposition: EDecomposition
    nontrivial: bool

    @property
    def ok(self) -> bool:
        return self.reduced_divergence.is_zero


@dataclass(frozen=True)
class ConservedVector:
    """Components per independent variable, reduced on solutions, plus the
    pre-reduction forms and provenance.  `verify` attaches the divergence
    report."""

    system: PdeSystem
    components: tuple[Expr, ...]
    raw_components: tuple[Expr, ...]
    generator: Generator | None = None
    substitution: Characteristic | None = None
    substitution_ok: bool | None = None
    report: VerificationReport | None = None

    def with_report(self, report: VerificationReport) -> "ConservedVector":
        return ConservedVector(self.system, self.components,
                               self.raw_components, self.generator,
                               self.substitution, self.substitution_ok, report)


def _slot_partial(lagr: Expr, dep: str, slots: tuple[str, ...]) -> Expr:
    """Derivative of the Lagrangian with respect to one ordered derivative
    slot.  Mixed derivative atoms carry the symmetric split: the atom
    derivative divides by the number of orderings of the slot tuple, which
    is what produces the 1/2 coefficients on mixed-derivative equations."""
    J = MultiIndex.of(*slots)
    d = jet_partial(lagr, JetVar(dep, J))
    if d.is_zero:
        return d
    mult = J.multiplicity()
    return d if mult == 1 else d / mult


def ibragimov_vector(sys: PdeSystem, g: Generator, phi=None,
                     rules: "RuleSet | Sequence" = ()) -> ConservedVector:
    """Conserved vector of a symmetry generator via the formal Lagrangian.

    Assembles, for each independent variable x^i,

        C^i = xi^i L + sum_T D_T(W^sigma) * B(sigma, (i,)+T),
        B(sigma, S) = sum_T' (-1)^|T'| D_T'( dL/du^sigma_(S+T') ),

    with T, T' ranging over ordered tuples of independent variables up to
    the system's differential order, then substitutes phi for the adjoined
    variables and reduces on solutions.  With phi=None the components keep
    the symbolic multiplier variables.

    A phi that fails the substitution determining system is accepted (the
    result is then generally not conserved); the failure is flagged on the
    returned vector rather than raised, so negative probes stay cheap.
    """
    rules = as_ruleset(rules)
    lagr = formal_lagrangian(sys)
    vnames = adjoint_variables(sys)
    r = sys.order
    W = characteristic_W(sys, g)

    def d_tuple(comp: Expr, T: tuple[str, ...]) -> Expr:
        for var in T:
            comp = total_derivative(comp, var)
        return comp

    raw = []
    for i, var in enumerate(sys.indep):
        checkpoint()
        c = g.xi[i] * lagr if not g.xi[i].is_zero else Expr.zero()
        for sigma, d in enumerate(sys.dep):
            for s in range(0, r):
                for T in itertools.product(sys.indep, repeat=s):
                    slots = (var,) + T
                    bracket = Expr.zero()
                    for sp in range(0, r - len(slots) + 1):
                        for Tp in itertools.product(sys.indep, repeat=sp):
                            dd = _slot_partial(lagr, d, slots + Tp)
                            if dd.is_zero:
                                continue
                            piece = d_tuple(dd, Tp)
                            bracket = bracket + (piece.scale(-1) if sp % 2 else piece)
                    if not bracket.is_zero:
                        c = c + d_tuple(W.components[sigma], T) * bracket
        raw.append(c)

    substitution_ok = None
    if phi is not None:
        phi = _as_characteristic(phi, len(sys.dep))
        residual = differential_substitution_residual(sys, phi, rules)
        substitution_ok = all(x.is_zero for x in residual)
        raw = [substitute_multiplier_vars(sys, c, phi, vnames) for c in raw]

    reduced = tuple(rules.reduce(sys.reduce(c)) for c in raw)
    return ConservedVector(sys, reduced, tuple(raw), g,
                           phi if phi is not None else None, substitution_ok)


def verify_divergence(sys: PdeSystem, vec: "ConservedVector | Sequence[Expr]",
                      rules: "RuleSet | Sequence" = ()) -> VerificationReport:
    """Check D_i C^i = 0 on solutions.

    The divergence is decomposed as sum M * D_J(E) + S; success means the
    remainder S vanishes, and the M coefficients are the explicit
    conservation-law identity.  Failure is a report state, not an error.
    """
    rules = as_ruleset(rules)
    comps = vec.components if isinstance(vec, ConservedVector) else tuple(vec)
    div = Expr.zero()
    for var, c in zip(sys.indep, comps):
        div = div + total_derivative(c, var)
    checkpoint()
    dec = e_decompose(div, sys, rules)
    nontrivial = any(not rules.reduce(sys.reduce(c)).is_zero for c in comps)
    return VerificationReport(dec.remainder, dec, nontrivial)


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    scale: Expr | None = None
    exact: bool = False
    discrepancy: tuple[Expr, ...] | None = None
    """Reduced difference C_ours - scale*C_ref; when `equivalent`, its
    divergence normalizes to zero identically (a trivial shift)."""


def compare_vectors(sys: PdeSystem, ours: Sequence[Expr], ref: Sequence[Expr],
                    rules: "RuleSet | Sequence" = ()) -> EquivalenceResult:
    """Equality of conservation laws up to a nonzero constant multiple,
    on-solution rewriting, and addition of a vector whose divergence
    vanishes identically.

    Both vectors are canonicalized by on-solution reduction.  Candidate
    scales are +-1 plus the leading-coefficient ratio when that ratio is
    an invertible constant (a rational times nonzero parameters), which
    covers reference vectors normalized by a parameter multiple.  A shift
    that merely vanishes on solutions would make any two conserved vectors
    compare equal, so the discrepancy's divergence must normalize to zero
    without using the equations.
    """
    rules = as_ruleset(rules)
    a = [rules.reduce(sys.reduce(c)) for c in ours]
    b = [rules.reduce(sys.reduce(c)) for c in ref]

    scales = [Expr.const(1), Expr.const(-1)]
    for x, y in zip(a, b):
        if x.is_zero or y.is_zero:
            continue
        tx, ty = x.terms[0], y.terms[0]
        if tx.powers == ty.powers:
            try:
                ratio = Expr.from_coeff(tx.coeff * ty.coeff.invert_unit())
            except ExprError:
                break
            if ratio not in scales:
                scales.append(ratio)
        break

    def diff_for(s: Expr) -> list[Expr]:
        return [x - s * y for x, y in zip(a, b)]

    for s in scales:
        if all(d.is_zero for d in diff_for(s)):
            return EquivalenceResult(True, s, True, tuple(Expr.zero() for _ in a))
    for s in scales:
        diff = diff_for(s)
        div = Expr.zero()
        for var, d in zip(sys.indep, diff):
            div = div + total_derivative(d, var)
        if rules.reduce(div).is_zero:
            return EquivalenceResult(True, s, False, tuple(diff))
    return EquivalenceResult(False)
