"""Exact coefficient arithmetic.

Coefficients of the term algebra are rational functions in the declared
parameters: a multivariate polynomial over Q divided by a monomial in
parameters that are flagged nonzero.  Restricting denominators to such
monomials keeps the representation canonical (no multivariate gcd needed)
while covering every division the engine performs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .atoms import Parameter
from .errors import ExprError

__all__ = ["Monomial", "Poly", "Coeff"]

# Monomial over parameters: sorted tuple of (Parameter, positive exponent).
Monomial = tuple[tuple[Parameter, int], ...]


def mono(*pairs: tuple[Parameter, int]) -> Monomial:
    acc: dict[Parameter, int] = {}
    for p, k in pairs:
        acc[p] = acc.get(p, 0) + k
    return tuple(sorted(((p, k) for p, k in acc.items() if k), key=lambda e: e[0].sort_key()))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return mono(*a, *b)


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    acc = dict(a)
    for p, k in b:
        acc[p] = max(acc.get(p, 0), k)
    return tuple(sorted(acc.items(), key=lambda e: e[0].sort_key()))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    """a / b; requires b to divide a."""
    acc = dict(a)
    for p, k in b:
        acc[p] = acc.get(p, 0) - k
        if acc[p] < 0:
            raise ValueError("monomial does not divide")
    return tuple(sorted(((p, k) for p, k in acc.items() if k), key=lambda e: e[0].sort_key()))


def mono_gcd(a: Monomial, b: Monomial) -> Monomial:
    db = dict(b)
    out = [(p, min(k, db[p])) for p, k in a if p in db]
    return tuple(sorted(((p, k) for p, k in out if k), key=lambda e: e[0].sort_key()))


class _MonoKey:
    """Graded-lexicographic monomial order (earlier parameter names are
    more significant); a genuine monomial order, as exact division needs."""

    __slots__ = ("total", "pairs")

    def __init__(self, m: Monomial):
        self.total = sum(k for _, k in m)
        self.pairs = tuple((p.name, k) for p, k in m)

    def _cmp(self, other: "_MonoKey") -> int:
        if self.total != other.total:
            return -1 if self.total < other.total else 1
        da, db = dict(self.pairs), dict(other.pairs)
        for n in sorted(set(da) | set(db)):
            ea, eb = da.get(n, 0), db.get(n, 0)
            if ea != eb:
                return -1 if ea < eb else 1
        return 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __eq__(self, other):
        return self._cmp(other) == 0


def _mono_key(m: Monomial) -> _MonoKey:
    return _MonoKey(m)


@dataclass(frozen=True)
class Poly:
    """Multivariate polynomial over Q in declared parameters.

    Terms are a sorted tuple of (monomial, nonzero Fraction) pairs; the
    empty tuple is the zero polynomial.
    """

    terms: tuple[tuple[Monomial, Fraction], ...] = ()

    def __post_init__(self) -> None:
        cleaned = tuple(
            sorted(((m, Fraction(c)) for m, c in self.terms if c != 0),
                   key=lambda e: _mono_key(e[0]))
        )
        object.__setattr__(self, "terms", cleaned)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "Poly":
        return _P_ZERO

    @staticmethod
    def const(q) -> "Poly":
        q = Fraction(q)
        return _P_ZERO if q == 0 else Poly((((), q),))

    @staticmethod
    def param(p: Parameter, k: int = 1) -> "Poly":
        return Poly(((mono((p, k)), Fraction(1)),))

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def as_fraction(self) -> Fraction | None:
        """The value if constant, else None."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and not self.terms[0][0]:
            return self.terms[0][1]
        return None

    def as_unit(self) -> tuple[Fraction, Monomial] | None:
        """(q, m) if the polynomial is the single term q*m, else None."""
        if len(self.terms) == 1:
            m, c = self.terms[0]
            return (c, m)
        return None

    def parameters(self) -> set[Parameter]:
        out: set[Parameter] = set()
        for m, _ in self.terms:
            out.update(p for p, _ in m)
        return out

    def degree_in(self, p: Parameter) -> int:
        d = 0
        for m, _ in self.terms:
            d = max(d, dict(m).get(p, 0))
        return d

    def mono_content(self) -> Monomial:
        """Gcd of all term monomials (the whole poly for zero is ())."""
        if not self.terms:
            return ()
        acc = self.terms[0][0]
        for m, _ in self.terms[1:]:
            acc = mono_gcd(acc, m)
            if not acc:
                break
        return acc

    def rational_content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        num = 0
        den = 1
        for _, c in self.terms:
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        acc = dict(self.terms)
        for m, c in other.terms:
            acc[m] = acc.get(m, Fraction(0)) + c
        return Poly(tuple(acc.items()))

    def __neg__(self) -> "Poly":
        return Poly(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        acc: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = mono_mul(m1, m2)
                acc[m] = acc.get(m, Fraction(0)) + c1 * c2
        return Poly(tuple(acc.items()))

    def scale(self, q) -> "Poly":
        q = Fraction(q)
        if q == 0:
            return _P_ZERO
        return Poly(tuple((m, c * q) for m, c in self.terms))

    def mul_mono(self, m: Monomial) -> "Poly":
        return Poly(tuple((mono_mul(tm, m), c) for tm, c in self.terms))

    def div_mono(self, m: Monomial) -> "Poly":
        return Poly(tuple((mono_div(tm, m), c) for tm, c in self.terms))

    def leading(self) -> tuple[Monomial, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[-1]

    def exact_div(self, other: "Poly") -> "Poly":
        """Exact polynomial division; raises if the division has a remainder."""
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        q_acc: dict[Monomial, Fraction] = {}
        rem = self
        lm, lc = other.leading()
        while not rem.is_zero:
            rm, rc = rem.leading()
            try:
                qm = mono_div(rm, lm)
            except ValueError:
                raise ArithmeticError("inexact polynomial division") from None
            qc = rc / lc
            q_acc[qm] = q_acc.get(qm, Fraction(0)) + qc
            rem = rem - other.mul_mono(qm).scale(qc)
        return Poly(tuple(q_acc.items()))

    def partial(self, p: Parameter) -> "Poly":
        acc: dict[Monomial, Fraction] = {}
        for m, c in self.terms:
            d = dict(m)
            k = d.get(p, 0)
            if not k:
                continue
            d[p] = k - 1
            nm = tuple(sorted(((pp, kk) for pp, kk in d.items() if kk),
                              key=lambda e: e[0].sort_key()))
            acc[nm] = acc.get(nm, Fraction(0)) + c * k
        return Poly(tuple(acc.items()))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            ms = "*".join(f"{p.name}^{k}" if k > 1 else p.name for p, k in m)
            parts.append(f"{c}{'*' + ms if ms else ''}")
        return " + ".join(parts)


_P_ZERO = object.__new__(Poly)
object.__setattr__(_P_ZERO, "terms", ())


@dataclass(frozen=True)
class Coeff:
    """Rational-function coefficient num/den with a monomial denominator.

    Canonical form: zero has an empty denominator, and den shares no
    parameter power with the monomial content of num.
    """

    num: Poly = Poly()
    den: Monomial = ()

    def __post_init__(self) -> None:
        num, den = self.num, self.den
        if num.is_zero:
            object.__setattr__(self, "den", ())
            return
        common = mono_gcd(num.mono_content(), den)
        if common:
            object.__setattr__(self, "num", num.div_mono(common))
            object.__setattr__(self, "den", mono_div(den, common))

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "Coeff":
        return _C_ZERO

    @staticmethod
    def one() -> "Coeff":
        return _C_ONE

    @staticmethod
    def const(q) -> "Coeff":
        return Coeff(Poly.const(q))

    @staticmethod
    def param(p: Parameter, k: int = 1) -> "Coeff":
        return Coeff(Poly.param(p, k))

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def as_fraction(self) -> Fraction | None:
        if self.den:
            return None
        return self.num.as_fraction()

    def as_unit(self) -> tuple[Fraction, Monomial, Monomial] | None:
        """(q, num-monomial, den-monomial) when a single term, else None."""
        u = self.num.as_unit()
        if u is None:
            return None
        return (u[0], u[1], self.den)

    def parameters(self) -> set[Parameter]:
        out = self.num.parameters()
        out.update(p for p, _ in self.den)
        return out

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Coeff") -> "Coeff":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        den = mono_lcm(self.den, other.den)
        n = (self.num.mul_mono(mono_div(den, self.den))
             + other.num.mul_mono(mono_div(den, other.den)))
        return Coeff(n, den)

    def __neg__(self) -> "Coeff":
        return Coeff(-self.num, self.den)

    def __sub__(self, other: "Coeff") -> "Coeff":
        return self + (-other)

    def __mul__(self, other: "Coeff") -> "Coeff":
        if self.is_zero or other.is_zero:
            return _C_ZERO
        return Coeff(self.num * other.num, mono_mul(self.den, other.den))

    def scale(self, q) -> "Coeff":
        return Coeff(self.num.scale(q), self.den)

    def invert_unit(self) -> "Coeff":
        """Inverse, defined only for q * monomial-in-nonzero-parameters."""
        u = self.as_unit()
        if u is None:
            raise ExprError(
                "division is only defined for products of nonzero parameters "
                "and literal rationals")
        q, nm, dm = u
        if q == 0:
            raise ExprError("zero denominator")
        bad = [p.name for p, _ in nm if not p.nonzero]
        if bad:
            raise ExprError(
                f"division by parameter(s) not declared nonzero: {', '.join(bad)}")
        return Coeff(Poly.const(1 / q).mul_mono(dm), nm)

    def __truediv__(self, other: "Coeff") -> "Coeff":
        return self * other.invert_unit()

    def partial(self, p: Parameter) -> "Coeff":
        k = dict(self.den).get(p, 0)
        out = Coeff(self.num.partial(p), self.den)
        if k:
            out = out + Coeff(self.num.scale(-k), mono_mul(self.den, mono((p, 1))))
        return out

    def __str__(self) -> str:
        s = str(self.num) if len(self.num.terms) <= 1 else f"({self.num})"
        if self.den:
            ds = "*".join(f"{p.name}^{k}" if k > 1 else p.name for p, k in self.den)
            s += f"/({ds})" if len(self.den) > 1 else f"/{ds}"
        return s


_C_ZERO = object.__new__(Coeff)
object.__setattr__(_C_ZERO, "num", _P_ZERO)
object.__setattr__(_C_ZERO, "den", ())
_C_ONE = Coeff(Poly.const(1))
