"""Canonical-form expressions.

An expression is a finite sum of terms; each term is an exact coefficient
(rational function in the declared parameters) times a power product of
atoms with positive integer exponents.  A fixed total order on atoms and
terms makes the representation unique, so structural equality of normal
forms decides semantic equality within the term algebra.

Arithmetic operators keep expressions canonical at every step:

  * products distribute over sums and sort;
  * parameters are folded into the coefficient field;
  * exponential factors merge, e^a * e^b -> e^(a+b);
  * exponents that collapse to rational constants become opaque constants
    (e^0 folds to 1);
  * zero is the empty sum and no term carries a zero coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .atoms import (Atom, ExpAtom, ExpConst, IndependentVar, JetVar,
                    MultiIndex, OpaqueDeriv, Parameter)
from .coeff import Coeff
from .errors import ExprError

__all__ = [
    "Term", "Expr", "atom_expr", "rational", "ivar", "param", "jet",
    "jet_atom", "opaque", "opaque_atom", "exp_of", "normalize",
    "partial", "substitute", "collect",
]

Powers = tuple[tuple[Atom, int], ...]


@dataclass(frozen=True)
class Term:
    coeff: Coeff
    powers: Powers = ()

    @property
    def degree(self) -> int:
        return sum(k for _, k in self.powers)

    def powers_key(self):
        return (self.degree, tuple((a.sort_key(), k) for a, k in self.powers))

    def sort_key(self):
        return (self.powers_key(), _coeff_key(self.coeff))

    def __str__(self) -> str:
        facs = "*".join(f"{a}^{k}" if k > 1 else str(a) for a, k in self.powers)
        if not facs:
            return str(self.coeff)
        return f"{self.coeff}*{facs}"


def _coeff_key(c: Coeff):
    num = tuple((tuple((p.name, k) for p, k in m), q) for m, q in c.num.terms)
    den = tuple((p.name, k) for p, k in c.den)
    return (num, den)


def _make_term(coeff: Coeff, factors: Iterable[tuple[Atom, int]]) -> Term | None:
    """Canonicalize one term: fold parameters into the coefficient, merge
    exponential factors, drop the term if the coefficient vanishes."""
    plain: dict[Atom, int] = {}
    exp_sum: Expr | None = None
    for a, k in factors:
        if k == 0:
            continue
        if k < 0 or not isinstance(k, int):
            raise ExprError("unsupported power")
        if isinstance(a, Parameter):
            coeff = coeff * Coeff.param(a, k)
        elif isinstance(a, ExpAtom):
            contrib = a.exponent if k == 1 else a.exponent.scale(k)
            exp_sum = contrib if exp_sum is None else exp_sum + contrib
        elif isinstance(a, ExpConst):
            contrib = Expr.const(a.value * k)
            exp_sum = contrib if exp_sum is None else exp_sum + contrib
        else:
            plain[a] = plain.get(a, 0) + k
    if coeff.is_zero:
        return None
    if exp_sum is not None and not exp_sum.is_zero:
        q = exp_sum.as_rational()
        exp_atom: Atom = ExpConst(q) if q is not None else ExpAtom(exp_sum)
        plain[exp_atom] = 1
    powers = tuple(sorted(plain.items(), key=lambda e: e[0].sort_key()))
    return Term(coeff, powers)


@dataclass(frozen=True)
class Expr:
    terms: tuple[Term, ...] = ()

    # -- construction ------------------------------------------------------

    @staticmethod
    def _from_map(acc: Mapping[Powers, Coeff]) -> "Expr":
        terms = [Term(c, p) for p, c in acc.items() if not c.is_zero]
        terms.sort(key=Term.powers_key, reverse=True)
        return Expr(tuple(terms))

    @staticmethod
    def _gather(raw_terms: Iterable[Term | None]) -> "Expr":
        acc: dict[Powers, Coeff] = {}
        for t in raw_terms:
            if t is None:
                continue
            acc[t.powers] = acc.get(t.powers, Coeff.zero()) + t.coeff
        return Expr._from_map(acc)

    @staticmethod
    def zero() -> "Expr":
        return _E_ZERO

    @staticmethod
    def const(q) -> "Expr":
        q = Fraction(q)
        if q == 0:
            return _E_ZERO
        return Expr((Term(Coeff.const(q)),))

    @staticmethod
    def from_coeff(c: Coeff) -> "Expr":
        if c.is_zero:
            return _E_ZERO
        return Expr((Term(c),))

    @staticmethod
    def from_atom(a: Atom) -> "Expr":
        t = _make_term(Coeff.one(), ((a, 1),))
        return Expr((t,)) if t is not None else _E_ZERO

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def as_rational(self) -> Fraction | None:
        """The value as an exact rational if the expression is one, else None."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and not self.terms[0].powers:
            return self.terms[0].coeff.as_fraction()
        return None

    def as_coeff(self) -> Coeff | None:
        """The coefficient if the expression is atom-free, else None."""
        if not self.terms:
            return Coeff.zero()
        if len(self.terms) == 1 and not self.terms[0].powers:
            return self.terms[0].coeff
        return None

    def atoms(self) -> set[Atom]:
        """All factor atoms, including those nested in exponents."""
        out: set[Atom] = set()
        for t in self.terms:
            for a, _ in t.powers:
                out.add(a)
                if isinstance(a, ExpAtom):
                    out.update(a.exponent.atoms())
        return out

    def opaque_atoms(self) -> set[OpaqueDeriv]:
        return {a for a in self.atoms() if isinstance(a, OpaqueDeriv)}

    def jet_atoms(self, dep: str | None = None) -> set[JetVar]:
        return {a for a in self.atoms()
                if isinstance(a, JetVar) and (dep is None or a.dep == dep)}

    def jet_order(self) -> int:
        """Highest derivative order present, counting opaque-function
        arguments (a function of u_x has order 1)."""
        best = 0
        for a in self.atoms():
            if isinstance(a, JetVar):
                best = max(best, a.order)
            elif isinstance(a, OpaqueDeriv):
                for arg in a.args:
                    if isinstance(arg, JetVar):
                        best = max(best, arg.order)
        return best

    def parameters(self) -> set[Parameter]:
        out: set[Parameter] = set()
        for t in self.terms:
            out.update(t.coeff.parameters())
            for a, _ in t.powers:
                if isinstance(a, ExpAtom):
                    out.update(a.exponent.parameters())
        return out

    def sort_key(self):
        return tuple(t.sort_key() for t in self.terms)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "Expr":
        other = _as_expr(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        acc: dict[Powers, Coeff] = {t.powers: t.coeff for t in self.terms}
        for t in other.terms:
            acc[t.powers] = acc.get(t.powers, Coeff.zero()) + t.coeff
        return Expr._from_map(acc)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr(tuple(Term(-t.coeff, t.powers) for t in self.terms))

    def __sub__(self, other) -> "Expr":
        return self + (-_as_expr(other))

    def __rsub__(self, other) -> "Expr":
        return _as_expr(other) + (-self)

    def __mul__(self, other) -> "Expr":
        other = _as_expr(other)
        if self.is_zero or other.is_zero:
            return _E_ZERO
        acc: dict[Powers, Coeff] = {}
        for t1 in self.terms:
            for t2 in other.terms:
                t = _make_term(t1.coeff * t2.coeff, t1.powers + t2.powers)
                if t is not None:
                    acc[t.powers] = acc.get(t.powers, Coeff.zero()) + t.coeff
        return Expr._from_map(acc)

    __rmul__ = __mul__

    def scale(self, q) -> "Expr":
        q = Fraction(q)
        if q == 0:
            return _E_ZERO
        return Expr(tuple(Term(t.coeff.scale(q), t.powers) for t in self.terms))

    def __pow__(self, n: int) -> "Expr":
        if not isinstance(n, int) or n < 0:
            raise ExprError("unsupported power")
        out = Expr.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __truediv__(self, other) -> "Expr":
        other = _as_expr(other)
        if other.is_zero:
            raise ExprError("zero denominator")
        c = other.as_coeff()
        if c is None:
            raise ExprError(
                "division is only defined for products of nonzero parameters "
                "and literal rationals")
        inv = c.invert_unit()
        return Expr(tuple(Term(t.coeff * inv, t.powers) for t in self.terms))

    def __rtruediv__(self, other) -> "Expr":
        return _as_expr(other) / self

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(str(t) for t in self.terms)


_E_ZERO = Expr(())


def _as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, Atom):
        return Expr.from_atom(x)
    if isinstance(x, (int, Fraction)):
        return Expr.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Expr")


# -- convenience constructors ------------------------------------------------

def atom_expr(a: Atom) -> Expr:
    return Expr.from_atom(a)


def rational(p, q=1) -> Expr:
    return Expr.const(Fraction(p, q))


def ivar(name: str) -> Expr:
    return Expr.from_atom(IndependentVar(name))


def param(name: str, nonzero: bool = False) -> Expr:
    return Expr.from_atom(Parameter(name, nonzero))


def jet_atom(dep: str, *dvars: str) -> JetVar:
    return JetVar(dep, MultiIndex.of(*dvars))


def jet(dep: str, *dvars: str) -> Expr:
    return Expr.from_atom(jet_atom(dep, *dvars))


def opaque_atom(func: str, args: tuple[Atom, ...], index: tuple[int, ...] = ()) -> OpaqueDeriv:
    return OpaqueDeriv(func, args, index)


def opaque(func: str, *args: Atom) -> Expr:
    return Expr.from_atom(OpaqueDeriv(func, tuple(args)))


def exp_of(e: Expr) -> Expr:
    """Exponential of an expression, folding constant exponents."""
    e = _as_expr(e)
    q = e.as_rational()
    if q is not None:
        return Expr.const(1) if q == 0 else Expr.from_atom(ExpConst(q))
    return Expr.from_atom(ExpAtom(e))


# -- kernel operations -------------------------------------------------------

def normalize(x) -> Expr:
    """Rebuild the canonical form from scratch.

    Accepts anything coercible to an expression; on an already-canonical
    expression this re-derives every term (including nested exponents), so
    normalize(normalize(e)) == normalize(e) by construction.
    """
    e = _as_expr(x)
    total = Expr.zero()
    for t in e.terms:
        piece = Expr.from_coeff(t.coeff)
        for a, k in t.powers:
            if isinstance(a, ExpAtom):
                piece = piece * exp_of(normalize(a.exponent)) ** k
            else:
                piece = piece * Expr.from_atom(a) ** k
        total = total + piece
    return total


def partial(e: Expr, a: Atom) -> Expr:
    """Formal partial derivative treating all other atoms as constants.

    The chain rule applies through exponential factors; an opaque-function
    atom has zero derivative unless `a` is that exact atom.  Parameters are
    differentiated inside the coefficient field.
    """
    e = _as_expr(e)
    out = Expr.zero()
    for t in e.terms:
        if isinstance(a, Parameter):
            dc = t.coeff.partial(a)
            if not dc.is_zero:
                out = out + Expr((Term(dc, t.powers),))
        for i, (atom, k) in enumerate(t.powers):
            rest = t.powers[:i] + t.powers[i + 1:]
            if atom == a:
                df = Expr((Term(t.coeff.scale(k), rest),))
                if k > 1:
                    df = df * Expr.from_atom(atom) ** (k - 1)
                out = out + df
            elif isinstance(atom, ExpAtom):
                dq = partial(atom.exponent, a)
                if not dq.is_zero:
                    base = Expr((Term(t.coeff, t.powers),))
                    out = out + base * dq
    return out


def substitute(e: Expr, bindings: Mapping[Atom, "Expr | int | Fraction"]) -> Expr:
    """Simultaneous substitution of atoms by expressions.

    Atoms inside exponential exponents are substituted too.  Binding an
    atom that occurs as an opaque-function argument is rejected: the
    argument list of an opaque function is a fixed symbol, not a slot.
    """
    e = _as_expr(e)
    binds = {a: _as_expr(v) for a, v in bindings.items()}
    if not binds:
        return e
    for key in binds:
        if isinstance(key, Parameter):
            raise ExprError("cannot substitute for a parameter atom")
    for a in e.atoms():
        if isinstance(a, OpaqueDeriv):
            for arg in a.args:
                if arg in binds:
                    raise ExprError(
                        f"cannot substitute into opaque-function argument "
                        f"{arg} of {a.func}")
    out = Expr.zero()
    for t in e.terms:
        piece = Expr.from_coeff(t.coeff)
        for a, k in t.powers:
            if a in binds:
                piece = piece * binds[a] ** k
            elif isinstance(a, ExpAtom):
                piece = piece * exp_of(substitute(a.exponent, binds)) ** k
            else:
                piece = piece * Expr.from_atom(a) ** k
        out = out + piece
    return out


def collect(e: Expr, selected: Iterable[Atom]) -> dict[Powers, Expr]:
    """Split into buckets keyed by the monomial in `selected` atoms.

    The sum of monomial * bucket over the result reproduces `e` exactly;
    bucket expressions contain no selected atom as a factor.  Occurrences
    nested inside exponential exponents or opaque-function arguments are
    part of composite atoms and are not split.
    """
    e = _as_expr(e)
    sel = set(selected)
    out: dict[Powers, Expr] = {}
    for t in e.terms:
        key = tuple((a, k) for a, k in t.powers if a in sel)
        rest = tuple((a, k) for a, k in t.powers if a not in sel)
        out[key] = out.get(key, Expr.zero()) + Expr((Term(t.coeff, rest),))
    return {k: v for k, v in out.items() if not v.is_zero}
