"""Undetermined-coefficient solving over an exact coefficient field.

A linear combination of user-supplied basis expressions is pushed through
one of the determining residuals; splitting the residual over jet
monomials and free coordinates yields a homogeneous linear system for the
unknown constants, solved exactly by fraction-free elimination.  Every
nullspace vector is substituted back automatically and must annihilate the
residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .cancel import checkpoint
from .determining import (adjoint_symmetry_residual,
                          differential_substitution_residual,
                          multiplier_residual, symmetry_residual)
from .expr.atoms import Parameter
from .expr.coeff import Coeff, Poly, mono_div, mono_gcd, mono_lcm
from .expr.errors import AnsatzError
from .expr.expression import Expr, Powers
from .expr.rules import RuleSet, as_ruleset
from .jet import PdeSystem
from .variational import Characteristic, _as_characteristic

__all__ = [
    "TARGETS", "AnsatzProblem", "Row", "NullspaceVector",
    "LinearSolveResult", "build_and_split", "solve_linear", "solve_ansatz",
]

TARGETS: dict[str, Callable] = {
    "symmetry": symmetry_residual,
    "adjoint-symmetry": adjoint_symmetry_residual,
    "multiplier": multiplier_residual,
    "differential-substitution": differential_substitution_residual,
}


def _fraction_gcd(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(math.gcd(a.numerator * b.denominator,
                             b.numerator * a.denominator),
                    a.denominator * b.denominator)


@dataclass(frozen=True)
class AnsatzProblem:
    """Find all c with residual(sum c_k * basis_k) = 0.

    Basis entries are characteristics (or single expressions for scalar
    systems); the unknowns are fresh parameters c1..cN.  Parameters are
    treated generically: a coefficient vanishes only if it is identically
    zero as a rational function.
    """

    system: PdeSystem
    target: str
    basis: tuple[Characteristic, ...]
    rules: RuleSet = field(default_factory=RuleSet)
    unknowns: tuple[Parameter, ...] = ()

    def __post_init__(self) -> None:
        if self.target not in TARGETS:
            raise AnsatzError(
                f"unknown target {self.target!r}; expected one of "
                f"{', '.join(sorted(TARGETS))}")
        if not self.basis:
            raise AnsatzError("empty ansatz basis")
        m = len(self.system.dep)
        basis = tuple(_as_characteristic(b, m) for b in self.basis)
        for b in basis:
            if all(c.is_zero for c in b.components):
                raise AnsatzError("zero basis expression")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "rules", as_ruleset(self.rules))
        if not self.unknowns:
            taken = {p.name for eq in self.system.equations
                     for p in eq.parameters()}
            for b in basis:
                for c in b.components:
                    taken.update(p.name for p in c.parameters())
            names: list[str] = []
            i = 1
            while len(names) < len(basis):
                cand = f"c{i}"
                if cand not in taken:
                    names.append(cand)
                i += 1
            object.__setattr__(self, "unknowns",
                               tuple(Parameter(n) for n in names))

    def combination(self) -> Characteristic:
        m = len(self.system.dep)
        comps = [Expr.zero()] * m
        for ck, b in zip(self.unknowns, self.basis):
            for i in range(m):
                comps[i] = comps[i] + Expr.from_atom(ck) * b.components[i]
        return Characteristic(tuple(comps))


@dataclass(frozen=True)
class Row:
    """One linear condition sum entries[k] * c_k = 0, keyed by the jet
    monomial (and residual component) that produced it."""

    key: Powers
    component: int
    entries: tuple[Coeff, ...]


def build_and_split(p: AnsatzProblem) -> list[Row]:
    """Residual of the symbolic combination, split over all non-unknown
    atoms; each bucket must be linear homogeneous in the unknowns."""
    residual = TARGETS[p.target](p.system, p.combination(), p.rules)
    unknown_set = set(p.unknowns)
    rows: list[Row] = []
    for comp_index, res in enumerate(residual):
        checkpoint()
        for term in res.terms:
            if any(q in unknown_set for q, _ in term.coeff.den):
                raise AnsatzError("residual not linear in unknowns")
            per_unknown = {c: Poly.zero() for c in p.unknowns}
            for monomial, q in term.coeff.num.terms:
                hits = [(par, k) for par, k in monomial if par in unknown_set]
                if not hits or len(hits) > 1 or hits[0][1] > 1:
                    raise AnsatzError("residual not linear in unknowns")
                par = hits[0][0]
                reduced = tuple((pp, kk) for pp, kk in monomial if pp != par)
                per_unknown[par] = per_unknown[par] + Poly(((reduced, q),))
            entries = tuple(Coeff(per_unknown[c], term.coeff.den)
                            for c in p.unknowns)
            rows.append(Row(term.powers, comp_index, entries))
    return rows


@dataclass(frozen=True)
class NullspaceVector:
    """Exact solution vector: entry k is numerators[k] / denominator.

    The denominator equals the first nonzero numerator, so the first
    nonzero entry is exactly 1; the cleared polynomial form (the
    numerators) is what gets substituted back for verification.
    """

    numerators: tuple[Poly, ...]
    denominator: Poly

    def entry_exprs(self) -> tuple[Expr, ...]:
        """Entries as expressions when the denominator is an invertible
        constant; otherwise the cleared representative (a harmless overall
        scale for homogeneous problems)."""
        den = Coeff(self.denominator)
        try:
            inv = den.invert_unit()
        except Exception:
            return tuple(Expr.from_coeff(Coeff(n)) for n in self.numerators)
        return tuple(Expr.from_coeff(Coeff(n) * inv) for n in self.numerators)


@dataclass(frozen=True)
class LinearSolveResult:
    vectors: tuple[NullspaceVector, ...]
    side_conditions: tuple[str, ...]
    rows: tuple[Row, ...]
    unknowns: tuple[Parameter, ...]

    @property
    def dimension(self) -> int:
        return len(self.vectors)


def _row_to_polys(row: Row) -> list[Poly]:
    den = ()
    for c in row.entries:
        den = mono_lcm(den, c.den)
    return [c.num.mul_mono(mono_div(den, c.den)) for c in row.entries]


def _normalize_poly_row(polys: list[Poly]) -> list[Poly]:
    content = Fraction(0)
    for p in polys:
        if not p.is_zero:
            c = p.rational_content()
            content = c if content == 0 else _fraction_gcd(content, c)
    if content not in (0, 1):
        polys = [p.scale(1 / content) for p in polys]
    return polys


def solve_linear(rows: Sequence[Row], unknowns: Sequence[Parameter]
                 ) -> LinearSolveResult:
    """Exact nullspace by fraction-free (Bareiss) elimination.

    Pivots that are not rational/nonzero-parameter units are recorded as
    side-conditions (the generic branch is taken); the returned basis is
    deterministic, normalized so each vector's first nonzero entry is 1.
    """
    n = len(unknowns)
    mat: list[list[Poly]] = []
    seen: set[tuple] = set()
    kept_rows: list[Row] = []
    for row in rows:
        polys = _normalize_poly_row(_row_to_polys(row))
        key = tuple(p.terms for p in polys)
        if all(p.is_zero for p in polys) or key in seen:
            continue
        seen.add(key)
        mat.append(polys)
        kept_rows.append(row)

    side: list[str] = []
    pivot_cols: list[int] = []
    prev_pivot = Poly.const(1)
    r = 0
    for col in range(n):
        checkpoint()
        pivot_row = None
        for i in range(r, len(mat)):
            if not mat[i][col].is_zero:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        pivot = mat[r][col]
        if pivot.as_unit() is None:
            side.append(str(pivot))
        for i in range(r + 1, len(mat)):
            factor = mat[i][col]
            if factor.is_zero:
                mat[i] = [(pivot * mat[i][j]).exact_div(prev_pivot)
                          for j in range(n)]
            else:
                mat[i] = [(pivot * mat[i][j] - factor * mat[r][j])
                          .exact_div(prev_pivot) for j in range(n)]
        prev_pivot = pivot
        pivot_cols.append(col)
        r += 1
        if r == len(mat):
            break

    free_cols = [c for c in range(n) if c not in pivot_cols]
    vectors = []
    for fc in free_cols:
        # Back-substitute over the fraction field, then clear denominators.
        num: dict[int, Poly] = {fc: Poly.const(1)}
        den: dict[int, Poly] = {fc: Poly.const(1)}
        for idx in range(len(pivot_cols) - 1, -1, -1):
            pc = pivot_cols[idx]
            acc_n, acc_d = Poly.zero(), Poly.const(1)
            for c in range(pc + 1, n):
                if c in num and not mat[idx][c].is_zero:
                    acc_n = acc_n * den[c] + mat[idx][c] * num[c] * acc_d
                    acc_d = acc_d * den[c]
            num[pc] = -acc_n
            den[pc] = acc_d * mat[idx][pc]
        common = Poly.const(1)
        for c in sorted(den):
            common = common * den[c]
        cleared = [num[c] * common.exact_div(den[c]) if c in num else Poly.zero()
                   for c in range(n)]
        nonzero = [p for p in cleared if not p.is_zero]
        content = Fraction(0)
        for p in nonzero:
            content = (p.rational_content() if content == 0
                       else _fraction_gcd(content, p.rational_content()))
        mono_common = nonzero[0].mono_content()
        for p in nonzero[1:]:
            mono_common = mono_gcd(mono_common, p.mono_content())
        if content not in (0, 1) or mono_common:
            cleared = [p.scale(1 / content).div_mono(mono_common)
                       if not p.is_zero else p for p in cleared]
        first = next(p for p in cleared if not p.is_zero)
        if first.leading()[1] < 0:
            cleared = [-p for p in cleared]
            first = next(p for p in cleared if not p.is_zero)
        vectors.append(NullspaceVector(tuple(cleared), first))

    return LinearSolveResult(tuple(vectors), tuple(side), tuple(kept_rows),
                             tuple(unknowns))


def solve_ansatz(p: AnsatzProblem) -> LinearSolveResult:
    """build_and_split + solve_linear + automatic soundness check."""
    rows = build_and_split(p)
    result = solve_linear(rows, p.unknowns)
    for vec in result.vectors:
        _check_solution(p, vec)
    return result


def _check_solution(p: AnsatzProblem, vec: NullspaceVector) -> None:
    m = len(p.system.dep)
    comps = [Expr.zero()] * m
    for k, b in enumerate(p.basis):
        coeff = Expr.from_coeff(Coeff(vec.numerators[k]))
        if coeff.is_zero:
            continue
        for i in range(m):
            comps[i] = comps[i] + coeff * b.components[i]
    if all(c.is_zero for c in comps):
        return
    residual = TARGETS[p.target](p.system, Characteristic(tuple(comps)), p.rules)
    if any(not x.is_zero for x in residual):
        raise AnsatzError(
            "internal error: nullspace vector does not annihilate the "
            "residual")
