"""Multi-index calculus and jet-space bookkeeping.

Conventions used throughout the package:

* Coordinate positions are 1-based (``i`` ranges over ``1..p``), because the
  class of a multi-index is an arithmetically meaningful value: a row of
  class ``k`` has exactly the multiplicative variables ``x^1..x^k`` and the
  involution count is ``sum(k * beta_k)``.
* Dependent-variable indices ``alpha`` are 1-based as well (``1..q``).
* All values here are immutable and hashable; operations are pure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Iterator, Sequence


@dataclass(frozen=True)
class BundleSignature:
    """Names of the independent (base) and dependent (fibre) coordinates.

    The order of ``independent`` is semantically significant: position 1 is
    the lowest class and position p the highest.
    """

    independent: tuple[str, ...]
    dependent: tuple[str, ...]

    def __init__(self, independent: Sequence[str], dependent: Sequence[str]):
        object.__setattr__(self, "independent", tuple(independent))
        object.__setattr__(self, "dependent", tuple(dependent))
        if not self.independent or not self.dependent:
            raise ValueError("need at least one independent and one dependent name")
        names = self.independent + self.dependent
        if len(set(names)) != len(names):
            raise ValueError(f"coordinate names must be pairwise distinct: {names}")

    @property
    def p(self) -> int:
        return len(self.independent)

    @property
    def q(self) -> int:
        return len(self.dependent)

    def position_of(self, name: str) -> int:
        """1-based position of an independent name."""
        try:
            return self.independent.index(name) + 1
        except ValueError:
            raise KeyError(f"unknown independent variable {name!r}") from None

    def alpha_of(self, name: str) -> int:
        """1-based index of a dependent name."""
        try:
            return self.dependent.index(name) + 1
        except ValueError:
            raise KeyError(f"unknown dependent variable {name!r}") from None

    def index_from_letters(self, letters: str) -> "MultiIndex":
        """Repeated-index string (e.g. ``"xyy"``) to a multi-index.

        Letter order is irrelevant; the canonical form counts occurrences.
        Only valid when every independent name is a single character.
        """
        if any(len(n) != 1 for n in self.independent):
            raise ValueError("repeated-index notation requires single-character names")
        exps = [0] * self.p
        for ch in letters:
            exps[self.position_of(ch) - 1] += 1
        return MultiIndex(exps)

    def letters_of(self, index: "MultiIndex") -> str:
        if any(len(n) != 1 for n in self.independent):
            raise ValueError("repeated-index notation requires single-character names")
        return "".join(self.independent[i - 1] * e for i, e in enumerate(index.exponents, start=1))


@total_ordering
@dataclass(frozen=True)
class MultiIndex:
    """Exponent p-tuple ``[j_1, ..., j_p]`` recording derivative counts."""

    exponents: tuple[int, ...]

    def __init__(self, exponents: Iterable[int]):
        exps = tuple(int(e) for e in exponents)
        if any(e < 0 for e in exps):
            raise ValueError(f"negative entry in multi-index {exps}")
        if not exps:
            raise ValueError("multi-index needs at least one entry")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def zero(cls, p: int) -> "MultiIndex":
        return cls((0,) * p)

    @property
    def p(self) -> int:
        return len(self.exponents)

    @property
    def order(self) -> int:
        return sum(self.exponents)

    @property
    def class_(self) -> int:
        """Position of the first non-vanishing entry (1-based).

        Undefined for the zero multi-index.
        """
        for i, e in enumerate(self.exponents, start=1):
            if e:
                return i
        raise ValueError("the zero multi-index has no class")

    def increment(self, i: int) -> "MultiIndex":
        """The index ``J,i`` with one more derivative in position ``i``."""
        if not 1 <= i <= self.p:
            raise IndexError(f"coordinate position {i} out of range 1..{self.p}")
        exps = list(self.exponents)
        exps[i - 1] += 1
        return MultiIndex(exps)

    def decrement(self, i: int) -> "MultiIndex":
        if not 1 <= i <= self.p:
            raise IndexError(f"coordinate position {i} out of range 1..{self.p}")
        if self.exponents[i - 1] == 0:
            raise ValueError(f"cannot decrement zero entry at position {i}")
        exps = list(self.exponents)
        exps[i - 1] -= 1
        return MultiIndex(exps)

    def factorial(self) -> int:
        out = 1
        for e in self.exponents:
            out *= math.factorial(e)
        return out

    @property
    def letters(self) -> tuple[int, ...]:
        """Positions repeated by multiplicity, ascending: [1,2,0] -> (1,2,2)."""
        return tuple(
            i for i, e in enumerate(self.exponents, start=1) for _ in range(e)
        )

    @property
    def sort_key(self) -> tuple:
        """Total order: by |J| first, then class-major recursion.

        Within one order this realizes: higher class is greater, ties broken
        by recursing on the index minus one unit of its class coordinate.
        For equal order the recursion is exactly lexicographic comparison of
        the ascending ``letters`` tuples.
        """
        return (self.order, self.letters)

    def __lt__(self, other: "MultiIndex") -> bool:
        if not isinstance(other, MultiIndex):
            return NotImplemented
        if self.p != other.p:
            raise ValueError("cannot compare multi-indices of different arity")
        return self.sort_key < other.sort_key

    def __repr__(self) -> str:
        return f"MultiIndex({list(self.exponents)})"


@dataclass(frozen=True)
class JetVariable:
    """Coordinate ``u^alpha_J`` of a jet space; order 0 is ``u^alpha`` itself."""

    alpha: int
    index: MultiIndex

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError("dependent index is 1-based")

    @property
    def order(self) -> int:
        return self.index.order

    @property
    def sort_key(self) -> tuple:
        # alpha negated so that a descending sort on the key lists lower
        # alpha first among equal indices
        return (self.index.order, self.index.letters, -self.alpha)

    @property
    def class_major_key(self) -> tuple:
        """Ranks higher-class derivatives above higher-order ones.

        Used by the series solver to pick principal derivatives; e.g. for
        coordinates (x, t) it ranks u_t above u_xx.
        """
        return (self.index.letters, -self.alpha)

    def name(self, signature: BundleSignature) -> str:
        base = signature.dependent[self.alpha - 1]
        if self.index.order == 0:
            return base
        if all(len(n) == 1 for n in signature.independent):
            return f"{base}_{signature.letters_of(self.index)}"
        args = ",".join(
            signature.independent[i - 1]
            for i, e in enumerate(self.index.exponents, start=1)
            for _ in range(e)
        )
        return f"d({base},{args})"

    def __repr__(self) -> str:
        return f"JetVariable(alpha={self.alpha}, index={list(self.index.exponents)})"


def enumerate_indices(p: int, n: int) -> list[MultiIndex]:
    """All multi-indices of order exactly ``n``, sorted descending.

    The count is C(n+p-1, p-1).
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    if n < 0:
        raise ValueError("order must be nonnegative")
    out = []
    # stars and bars: positions of p-1 separators among n+p-1 slots
    for bars in itertools.combinations(range(n + p - 1), p - 1):
        exps = []
        prev = -1
        for b in bars:
            exps.append(b - prev - 1)
            prev = b
        exps.append(n + p - 1 - prev - 1)
        out.append(MultiIndex(exps))
    out.sort(key=lambda j: j.sort_key, reverse=True)
    return out


def enumerate_indices_up_to(p: int, n: int) -> list[MultiIndex]:
    """All multi-indices of order <= n, sorted descending."""
    out: list[MultiIndex] = []
    for m in range(n, -1, -1):
        out.extend(enumerate_indices(p, m))
    return out


def jet_variables(signature: BundleSignature, n: int, exact: bool = False) -> list[JetVariable]:
    """Jet variables of order <= n (or == n when ``exact``), sorted descending.

    Descending means highest index first; among equal indices, lower alpha
    first.
    """
    indices = enumerate_indices(signature.p, n) if exact else enumerate_indices_up_to(signature.p, n)
    out = [
        JetVariable(alpha, j)
        for j in indices
        for alpha in range(1, signature.q + 1)
    ]
    out.sort(key=lambda v: v.sort_key, reverse=True)
    return out


def jet_dim(p: int, q: int, n: int) -> int:
    """Number of coordinates on the n-th order jet space: p + q*C(n+p, p)."""
    if p < 1 or q < 1 or n < 0:
        raise ValueError("need p >= 1, q >= 1, n >= 0")
    return p + q * math.comb(n + p, p)


def format_point(signature: BundleSignature, point: Sequence[Fraction]) -> str:
    return ", ".join(f"{n}={v}" for n, v in zip(signature.independent, point))


def iter_index_children(index: MultiIndex) -> Iterator[tuple[int, MultiIndex]]:
    """Each index of the next order exactly once: increment positions <= class.

    The child ``J + e_i`` with ``i <= class(J)`` has class ``i``, and every
    index of order |J|+1 arises this way from exactly one parent.
    """
    cap = index.class_ if index.order else index.p
    for i in range(1, cap + 1):
        yield i, index.increment(i)
