"""Symbol matrices, class counts, and the finite symbol-involution test.

The symbol of an order-n system is the matrix of coefficients of the
order-n jet variables, one row per equation, columns highest first. Row
echelon assigns each row a class (the class of its pivot column's
multi-index); the symbol is involutive precisely when the rank of the
prolonged symbol equals sum(k * beta_k) over the class counts beta_k.

That count is coordinate-dependent: in unlucky frames it undershoots and
the test reports a false negative. ``delta_retry`` restores sharp counts by
searching coordinate permutations or applying a seeded unimodular change.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .diffpoly import DiffPolynomial
from .errors import NonLinearSystemError
from .jetspace import JetVariable, jet_variables
from .linalg import EchelonResult, row_echelon
from .systems import DiffSystem, change_coordinates, prolong


@dataclass(frozen=True)
class SymbolMatrix:
    """Top-order Jacobian block of a system, with cached echelon data."""

    system: DiffSystem
    columns: tuple[JetVariable, ...]
    rows: tuple[tuple[tuple[JetVariable, DiffPolynomial], ...], ...]

    @cached_property
    def generic(self) -> bool:
        """True when some entry still contains jet variables.

        Happens only for equations nonlinear in their top-order jets; the
        echelon then treats jets as transcendental indeterminates.
        """
        return any(not c.is_x_poly for row in self.rows for _, c in row)

    @cached_property
    def echelon(self) -> EchelonResult:
        return row_echelon([dict(r) for r in self.rows], self.columns,
                           generic=True)

    @property
    def rank(self) -> int:
        return self.echelon.rank

    def matrix(self) -> list[list[DiffPolynomial]]:
        zero = DiffPolynomial.zero(self.system.signature)
        return [[dict(row).get(c, zero) for c in self.columns] for row in self.rows]


@dataclass(frozen=True)
class ClassSignature:
    """Echelon classes of a symbol: beta[k-1] rows of class k."""

    beta: tuple[int, ...]
    rank: int
    generic: bool

    @property
    def sum_k_beta(self) -> int:
        return sum(k * b for k, b in enumerate(self.beta, start=1))


def symbol_of(system: DiffSystem) -> SymbolMatrix:
    """Matrix of partials of each equation by the top-order jet variables."""
    columns = tuple(jet_variables(system.signature, system.order, exact=True))
    rows = []
    for eq in system.equations:
        entries = []
        for v in columns:
            d = eq.partial_jet(v)
            if not d.is_zero:
                entries.append((v, d))
        rows.append(tuple(entries))
    return SymbolMatrix(system, columns, tuple(rows))


def class_signature(system: DiffSystem) -> ClassSignature:
    """Class counts of the echelonized symbol.

    Requires declared order >= 1 (order-0 jet variables have no class).
    """
    if system.order < 1:
        raise ValueError("class counts need a system of order at least 1")
    sym = symbol_of(system)
    beta = [0] * system.signature.p
    for col in sym.echelon.pivots:
        beta[col.index.class_ - 1] += 1
    return ClassSignature(tuple(beta), sym.rank, sym.generic)


def multiplicative_positions(row_class: int, p: int) -> list[int]:
    """Multiplicative variables of a class-k row: positions 1..k."""
    if not 1 <= row_class <= p:
        raise ValueError(f"class {row_class} out of range 1..{p}")
    return list(range(1, row_class + 1))


@dataclass(frozen=True)
class SymbolTest:
    involutive: bool
    sum_k_beta: int
    rank_prolonged_symbol: int
    delta_suspect: bool
    signature: ClassSignature


def symbol_involutive(system: DiffSystem) -> SymbolTest:
    """Compare rank of the prolonged symbol against sum(k * beta_k).

    ``delta_suspect`` flags a failed test: the gap may be an artifact of
    delta-singular coordinates rather than a genuinely non-involutive
    symbol, so callers should retry in better coordinates before acting.
    """
    sig = class_signature(system)
    rank1 = symbol_of(prolong(system, 1)).rank
    # multiplicative prolongations have distinct pivots, so the count can
    # never exceed the prolonged rank; a violation means the term order or
    # the echelon is broken
    assert rank1 >= sig.sum_k_beta, (
        f"prolonged symbol rank {rank1} below class count {sig.sum_k_beta}")
    involutive = rank1 == sig.sum_k_beta
    return SymbolTest(involutive, sig.sum_k_beta, rank1,
                      delta_suspect=not involutive, signature=sig)


@dataclass(frozen=True)
class DeltaRetryResult:
    transform: tuple[tuple[Fraction, ...], ...]
    system: DiffSystem
    signature: ClassSignature
    changed: bool


def _identity(p: int) -> list[list[Fraction]]:
    return [[Fraction(1 if r == c else 0) for c in range(p)] for r in range(p)]


def _permutation_matrix(perm: tuple[int, ...]) -> list[list[Fraction]]:
    # x'_j = x_{perm[j]}: row j has a 1 in column perm[j]
    p = len(perm)
    return [[Fraction(1 if c == perm[r] else 0) for c in range(p)] for r in range(p)]


def _random_unimodular(rng: random.Random, p: int) -> list[list[Fraction]]:
    """Product of a few integer shears: exactly invertible, determinant 1."""
    A = _identity(p)
    for _ in range(max(2, p)):
        i, j = rng.sample(range(p), 2)
        c = rng.choice([-2, -1, 1, 2])
        for col in range(p):
            A[i][col] += c * A[j][col]
    return A


def delta_retry(system: DiffSystem, strategy: str = "permutation",
                seed: int = 0, attempts: int = 8) -> DeltaRetryResult:
    """Search for coordinates maximizing sum(k * beta_k).

    ``permutation`` tries all p! coordinate relabelings (exact, keeps the
    system sparse); ``random-linear`` draws seeded unimodular changes, which
    reach delta-regular frames permutations cannot. Deterministic given the
    seed. Early exit when the count meets the prolonged symbol rank, the
    provable maximum.
    """
    if not system.is_linear:
        raise NonLinearSystemError("coordinate retry needs a linear system")
    p = system.signature.p
    base_sig = class_signature(system)
    ceiling = symbol_of(prolong(system, 1)).rank
    best = DeltaRetryResult(tuple(tuple(r) for r in _identity(p)), system,
                            base_sig, changed=False)
    if base_sig.sum_k_beta == ceiling or p == 1:
        return best

    if strategy == "permutation":
        candidates = [
            _permutation_matrix(perm)
            for perm in itertools.permutations(range(p))
        ][1:]  # identity already evaluated
    elif strategy == "random-linear":
        rng = random.Random(seed)
        candidates = [_random_unimodular(rng, p) for _ in range(attempts)]
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    for A in candidates:
        transformed = change_coordinates(system, A)
        sig = class_signature(transformed)
        if sig.sum_k_beta > best.signature.sum_k_beta:
            best = DeltaRetryResult(tuple(tuple(Fraction(v) for v in row) for row in A),
                                    transformed, sig, changed=True)
            if sig.sum_k_beta == ceiling:
                break
    return best
