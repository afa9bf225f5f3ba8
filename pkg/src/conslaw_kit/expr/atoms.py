"""Atomic symbols of the term algebra.

Atoms are the indivisible multiplicative factors expressions are built
from: independent variables, declared parameters, jet coordinates (a
dependent variable together with a derivative multi-index), formal
derivatives of opaque functions, and exponential factors.  Mixed partials
commute, so multi-indices are kept in a canonical sorted form and u_{xt}
and u_{tx} denote the same atom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover
    from .expression import Expr

__all__ = [
    "MultiIndex",
    "Atom",
    "IndependentVar",
    "Parameter",
    "OpaqueDeriv",
    "JetVar",
    "ExpAtom",
    "ExpConst",
]


@dataclass(frozen=True)
class MultiIndex:
    """Multiset of differentiation variables, e.g. {x: 1, t: 2} for u_{xtt}.

    Stored as a sorted tuple of (variable name, count) pairs with counts >= 1,
    which makes the representation independent of differentiation order.
    """

    counts: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        cleaned = tuple(sorted((n, c) for n, c in self.counts if c != 0))
        if any(c < 0 for _, c in cleaned):
            raise ValueError("negative derivative count")
        object.__setattr__(self, "counts", cleaned)

    @staticmethod
    def of(*names: str) -> "MultiIndex":
        acc: dict[str, int] = {}
        for n in names:
            acc[n] = acc.get(n, 0) + 1
        return MultiIndex(tuple(acc.items()))

    @property
    def order(self) -> int:
        return sum(c for _, c in self.counts)

    def get(self, name: str) -> int:
        for n, c in self.counts:
            if n == name:
                return c
        return 0

    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.counts)

    def bump(self, name: str) -> "MultiIndex":
        return self + MultiIndex(((name, 1),))

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        acc = dict(self.counts)
        for n, c in other.counts:
            acc[n] = acc.get(n, 0) + c
        return MultiIndex(tuple(acc.items()))

    def __sub__(self, other: "MultiIndex") -> "MultiIndex":
        acc = dict(self.counts)
        for n, c in other.counts:
            acc[n] = acc.get(n, 0) - c
            if acc[n] < 0:
                raise ValueError(f"{self} does not contain {other}")
        return MultiIndex(tuple(acc.items()))

    def contains(self, other: "MultiIndex") -> bool:
        return all(self.get(n) >= c for n, c in other.counts)

    def to_seq(self) -> tuple[str, ...]:
        """Expanded sorted sequence, e.g. ('t', 't', 'x') for {t:2, x:1}."""
        out: list[str] = []
        for n, c in self.counts:
            out.extend([n] * c)
        return tuple(out)

    def multiplicity(self) -> int:
        """Number of ordered differentiation sequences realizing this index."""
        m = math.factorial(self.order)
        for _, c in self.counts:
            m //= math.factorial(c)
        return m

    def sub_indices(self) -> Iterator[tuple["MultiIndex", int]]:
        """All K <= J componentwise, with the product-of-binomials weight."""
        items = self.counts
        if not items:
            yield MultiIndex(), 1
            return

        def rec(i: int, acc: list[tuple[str, int]], weight: int):
            if i == len(items):
                yield MultiIndex(tuple(acc)), weight
                return
            name, cnt = items[i]
            for k in range(cnt + 1):
                acc.append((name, k))
                yield from rec(i + 1, acc, weight * math.comb(cnt, k))
                acc.pop()

        yield from rec(0, [], 1)

    def sort_key(self):
        return (self.order, self.counts)

    def __str__(self) -> str:
        return "".join(self.to_seq()) or "0"


class Atom:
    """Base class for atomic factors; provides the deterministic total order."""

    _RANK = -1

    def sort_key(self):
        raise NotImplementedError

    def __lt__(self, other: "Atom") -> bool:
        return self.sort_key() < other.sort_key()


@dataclass(frozen=True)
class IndependentVar(Atom):
    name: str

    _RANK = 0

    def sort_key(self):
        return (0, self.name)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Parameter(Atom):
    """Declared constant; `nonzero` marks it legal to divide by."""

    name: str
    nonzero: bool = False

    _RANK = 1

    def sort_key(self):
        return (1, self.name)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class OpaqueDeriv(Atom):
    """Formal derivative of an opaque function, e.g. g'(u) or f_{xt}.

    `args` fixes the function's argument atoms; `index` counts derivatives
    per argument slot.  An all-zero index denotes the function value itself.
    """

    func: str
    args: tuple[Atom, ...]
    index: tuple[int, ...] = ()

    _RANK = 2

    def __post_init__(self) -> None:
        idx = self.index or (0,) * len(self.args)
        if len(idx) != len(self.args):
            raise ValueError(f"index/arity mismatch for {self.func}")
        if any(k < 0 for k in idx):
            raise ValueError("negative derivative count")
        object.__setattr__(self, "index", tuple(idx))

    @property
    def order(self) -> int:
        return sum(self.index)

    def bump(self, slot: int) -> "OpaqueDeriv":
        idx = list(self.index)
        idx[slot] += 1
        return OpaqueDeriv(self.func, self.args, tuple(idx))

    def sort_key(self):
        return (2, self.func, self.order, self.index,
                tuple(a.sort_key() for a in self.args))

    def __str__(self) -> str:
        base = self.func
        if self.order == 0:
            return base
        subs = "".join(
            str(a) * k for a, k in zip(self.args, self.index) if k
        )
        return f"{base}_{subs}"


@dataclass(frozen=True)
class JetVar(Atom):
    """Jet coordinate: dependent variable `dep` differentiated by `index`."""

    dep: str
    index: MultiIndex = field(default_factory=MultiIndex)

    _RANK = 3

    @property
    def order(self) -> int:
        return self.index.order

    def bump(self, name: str) -> "JetVar":
        return JetVar(self.dep, self.index.bump(name))

    def sort_key(self):
        return (3, self.dep, self.index.sort_key())

    def __str__(self) -> str:
        if self.index.order == 0:
            return self.dep
        return f"{self.dep}_{''.join(self.index.to_seq())}"


@dataclass(frozen=True)
class ExpAtom(Atom):
    """Exponential factor e^q; `exponent` is a canonical expression that is
    not a rational constant (constant exponents live in ExpConst)."""

    exponent: "Expr"

    _RANK = 4

    def sort_key(self):
        return (4, 1, self.exponent.sort_key())

    def __str__(self) -> str:
        return f"exp({self.exponent})"


@dataclass(frozen=True)
class ExpConst(Atom):
    """Opaque constant e^q for a nonzero rational q; kept symbolic so that
    exactness is preserved when a substitution collapses an exponent."""

    value: Fraction

    _RANK = 4

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", Fraction(self.value))
        if self.value == 0:
            raise ValueError("e^0 folds to 1; ExpConst must be nonzero")

    def sort_key(self):
        return (4, 0, self.value)

    def __str__(self) -> str:
        return f"exp({self.value})"
