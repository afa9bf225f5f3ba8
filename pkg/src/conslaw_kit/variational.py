"""Variational operator calculus.

Euler operator, formal Lagrangian with adjoined multiplier variables, the
adjoint system, linearization of a PDE system and its formal adjoint (both
as expressions and as differential-operator coefficient tables), and the
self-adjointness test that decides whether a system is variational.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .expr.atoms import JetVar, MultiIndex, OpaqueDeriv
from .expr.expression import Expr, atom_expr
from .jet import (PdeSystem, jet_indices_of, jet_partial, total_derivative_multi)

__all__ = [
    "Characteristic", "DiffOperator", "euler", "adjoint_variables",
    "formal_lagrangian", "adjoint_system", "linearize_table", "linearize",
    "adjoint_linearize", "is_variational", "VariationalVerdict",
]


@dataclass(frozen=True)
class Characteristic:
    """Evolutionary-form components, one expression per dependent variable.

    The same carrier serves symmetry characteristics, adjoint-symmetry
    solutions, substitutions and multiplier candidates.
    """

    components: tuple[Expr, ...]

    @staticmethod
    def of(*components: Expr) -> "Characteristic":
        return Characteristic(tuple(components))

    @property
    def order(self) -> int:
        return max((c.jet_order() for c in self.components), default=0)

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)


def _as_characteristic(c, m: int) -> Characteristic:
    if isinstance(c, Characteristic):
        ch = c
    elif isinstance(c, Expr):
        ch = Characteristic((c,))
    else:
        ch = Characteristic(tuple(c))
    if len(ch) != m:
        raise ValueError(f"characteristic has {len(ch)} components, system has {m}")
    return ch


@dataclass(frozen=True)
class DiffOperator:
    """Matrix differential operator sum_J coeff * D_J.

    `entries[(target, source)][J]` is the coefficient of D_J applied to the
    source component contributing to the target row; absent entries are
    zero and zero coefficients are dropped.
    """

    target_dim: int
    source_dim: int
    entries: Mapping[tuple[int, int], Mapping[MultiIndex, Expr]]

    @staticmethod
    def build(target_dim: int, source_dim: int,
              raw: Mapping[tuple[int, int], Mapping[MultiIndex, Expr]]) -> "DiffOperator":
        cleaned = {}
        for key, table in raw.items():
            kept = {J: c for J, c in table.items() if not c.is_zero}
            if kept:
                cleaned[key] = kept
        return DiffOperator(target_dim, source_dim, cleaned)

    def entry(self, target: int, source: int, J: MultiIndex) -> Expr:
        return self.entries.get((target, source), {}).get(J, Expr.zero())

    def indices(self, target: int, source: int) -> list[MultiIndex]:
        table = self.entries.get((target, source), {})
        return sorted(table, key=MultiIndex.sort_key)

    def apply(self, comp: Sequence[Expr]) -> list[Expr]:
        out = []
        for a in range(self.target_dim):
            acc = Expr.zero()
            for r in range(self.source_dim):
                for J, c in self.entries.get((a, r), {}).items():
                    acc = acc + c * total_derivative_multi(comp[r], J)
            out.append(acc)
        return out

    def adjoint(self) -> "DiffOperator":
        """Formal adjoint re-expanded to sum_K coeff * D_K normal form.

        The (a, r) entry of the adjoint collects, from the (r, a) entries of
        the original, the Leibniz expansion of (-1)^|J| D_J(coeff * .).
        """
        acc: dict[tuple[int, int], dict[MultiIndex, Expr]] = {}
        for (r, a), table in self.entries.items():
            dest = acc.setdefault((a, r), {})
            for J, c in table.items():
                sign = -1 if J.order % 2 else 1
                for K, w in J.sub_indices():
                    piece = total_derivative_multi(c, J - K).scale(sign * w)
                    dest[K] = dest.get(K, Expr.zero()) + piece
        return DiffOperator.build(self.source_dim, self.target_dim, acc)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOperator):
            return NotImplemented
        if (self.target_dim, self.source_dim) != (other.target_dim, other.source_dim):
            return False
        keys = set(self.entries) | set(other.entries)
        for key in keys:
            a = self.entries.get(key, {})
            b = other.entries.get(key, {})
            for J in set(a) | set(b):
                if a.get(J, Expr.zero()) != b.get(J, Expr.zero()):
                    return False
        return True

    __hash__ = None  # type: ignore[assignment]


def euler(e: Expr, dep: str) -> Expr:
    """Variational derivative delta e / delta dep.

    sum over the derivative indices J on which e depends of
    (-1)^|J| D_J (d e / d dep_J); the sum truncates at the orders actually
    present, and opaque functions of dep contribute through the chain rule.
    """
    out = Expr.zero()
    for J in sorted(jet_indices_of(e, dep), key=MultiIndex.sort_key):
        de = jet_partial(e, JetVar(dep, J))
        if de.is_zero:
            continue
        piece = total_derivative_multi(de, J)
        out = out + (piece.scale(-1) if J.order % 2 else piece)
    return out


def adjoint_variables(sys: PdeSystem) -> tuple[str, ...]:
    """Deterministic fresh names for the adjoined multiplier variables."""
    used = set(sys.indep) | set(sys.dep)
    for eq in sys.equations:
        for a in eq.atoms():
            if isinstance(a, JetVar):
                used.add(a.dep)
            elif isinstance(a, OpaqueDeriv):
                used.add(a.func)
        used.update(p.name for p in eq.parameters())
    base = "v"
    while base in used or any(f"{base}{i + 1}" in used for i in range(len(sys.dep))):
        base += "v"
    if len(sys.dep) == 1:
        return (base,)
    return tuple(f"{base}{i + 1}" for i in range(len(sys.dep)))


def formal_lagrangian(sys: PdeSystem) -> Expr:
    """sum_beta v^beta * E^beta with fresh dependent variables v.

    Mixed-derivative atoms need no textual symmetrization here because
    u_{xt} and u_{tx} are the same atom; the symmetric split of mixed
    slots is applied where the Lagrangian is differentiated with respect
    to an ordered derivative slot (conserved-vector assembly).
    """
    out = Expr.zero()
    for name, eq in zip(adjoint_variables(sys), sys.equations):
        out = out + atom_expr(JetVar(name)) * eq
    return out


def adjoint_system(sys: PdeSystem) -> list[Expr]:
    """Euler derivatives of the formal Lagrangian: one expression per
    dependent variable, in the adjoined v variables, not reduced."""
    lagr = formal_lagrangian(sys)
    return [euler(lagr, d) for d in sys.dep]


def linearize_table(sys: PdeSystem) -> DiffOperator:
    raw: dict[tuple[int, int], dict[MultiIndex, Expr]] = {}
    for a, eq in enumerate(sys.equations):
        for r, d in enumerate(sys.dep):
            table = {}
            for J in jet_indices_of(eq, d):
                c = jet_partial(eq, JetVar(d, J))
                if not c.is_zero:
                    table[J] = c
            if table:
                raw[(a, r)] = table
    return DiffOperator.build(len(sys.equations), len(sys.dep), raw)


def linearize(sys: PdeSystem, eta) -> tuple[list[Expr], DiffOperator]:
    """Linearization applied to a characteristic; expressions are not
    reduced on solutions (reduction is the caller's choice)."""
    ch = _as_characteristic(eta, len(sys.dep))
    table = linearize_table(sys)
    return table.apply(list(ch)), table


def adjoint_linearize(sys: PdeSystem, omega) -> tuple[list[Expr], DiffOperator]:
    """Adjoint linearization applied to a characteristic.

    The expressions follow the defining alternating-sign sum
    sum_J (-1)^|J| D_J(omega * dE/du_J); the returned operator is the
    formal adjoint of the linearization table in Leibniz normal form, an
    independent code path the expressions are checked against in tests.
    """
    ch = _as_characteristic(omega, len(sys.dep))
    table = linearize_table(sys)
    out = []
    for a in range(len(sys.dep)):
        acc = Expr.zero()
        for r in range(len(sys.equations)):
            for J, c in table.entries.get((r, a), {}).items():
                piece = total_derivative_multi(ch.components[r] * c, J)
                acc = acc + (piece.scale(-1) if J.order % 2 else piece)
        out.append(acc)
    return out, table.adjoint()


@dataclass(frozen=True)
class VariationalVerdict:
    ok: bool
    witness: tuple[int, int, MultiIndex, Expr] | None = None
    """(target, source, index, adjoint-minus-direct coefficient) for the
    first differing operator entry, reduced on solutions."""

    def __bool__(self) -> bool:
        return self.ok


def is_variational(sys: PdeSystem) -> VariationalVerdict:
    """Whether the linearization is formally self-adjoint on solutions.

    Compares the linearization table with its formal adjoint entry by
    entry; a variational system admits a Lagrangian and its adjoint
    symmetries are symmetries.
    """
    direct = linearize_table(sys)
    adj = direct.adjoint()
    m = len(sys.dep)
    for a in range(len(sys.equations)):
        for r in range(m):
            js = set(direct.entries.get((a, r), {})) | set(adj.entries.get((a, r), {}))
            for J in sorted(js, key=MultiIndex.sort_key):
                diff = sys.reduce(adj.entry(a, r, J) - direct.entry(a, r, J))
                if not diff.is_zero:
                    return VariationalVerdict(False, (a, r, J, diff))
    return VariationalVerdict(True)
