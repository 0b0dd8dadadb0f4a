"""Differential equations as finite sets of differential polynomials.

A system carries a declared jet order n and lives on the n-th order jet
space. Prolongation adjoins total derivatives, projection drops to a lower
jet space, and all ranks are generic: row operations happen over the field
of rational functions of the base point (and, for nonlinear Jacobians, of
the jet variables themselves).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .diffpoly import DiffPolynomial, Monomial, canonical_equation
from .errors import (EmptyProjectionError, NonLinearSystemError,
                     SignatureMismatchError)
from .jetspace import (BundleSignature, JetVariable, MultiIndex,
                       iter_index_children, jet_dim, jet_variables)
from .linalg import EchelonResult, in_row_space, normalize_row, row_echelon


@dataclass(frozen=True)
class Provenance:
    base: "DiffSystem"
    prolonged_by: int


@dataclass(frozen=True)
class DiffSystem:
    """Finite equation set with a declared jet order.

    Equations are canonicalized on construction: common x-monomial factors
    stripped, leading coefficient scaled to 1, duplicates removed, zero
    polynomials dropped, deterministic descending order.
    """

    signature: BundleSignature
    equations: tuple[DiffPolynomial, ...]
    order: int
    provenance: Provenance | None = field(default=None, compare=False, repr=False)

    def __init__(self, signature: BundleSignature,
                 equations: Sequence[DiffPolynomial], order: int,
                 provenance: Provenance | None = None):
        canon: dict[DiffPolynomial, None] = {}
        for eq in equations:
            if eq.signature != signature:
                raise SignatureMismatchError("equation signature differs from system signature")
            if eq.is_zero:
                continue
            canon.setdefault(canonical_equation(eq), None)
        eqs = sorted(canon, key=lambda e: e.sort_value(), reverse=True)
        if not eqs:
            raise ValueError("a system needs at least one nonzero equation")
        if order < 0:
            raise ValueError("declared order must be nonnegative")
        for eq in eqs:
            o = eq.order
            if o is not None and o > order:
                raise ValueError(
                    f"equation of order {o} exceeds the declared order {order}")
        object.__setattr__(self, "signature", signature)
        object.__setattr__(self, "equations", tuple(eqs))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "provenance", provenance)

    @property
    def is_linear(self) -> bool:
        return all(eq.is_linear for eq in self.equations)

    def __len__(self) -> int:
        return len(self.equations)

    def __repr__(self) -> str:
        from .textio import format_system
        body = "; ".join(format_system(self).splitlines())
        return f"<DiffSystem order={self.order}: {body}>"


@dataclass(frozen=True)
class AffineRow:
    """One linear equation as coefficients over Q[x] plus a constant."""

    coefficients: tuple[tuple[JetVariable, DiffPolynomial], ...]
    constant: DiffPolynomial

    def as_row(self) -> dict:
        row = {v: c for v, c in self.coefficients if not c.is_zero}
        if not self.constant.is_zero:
            row[None] = self.constant
        return row

    def to_polynomial(self, signature: BundleSignature) -> DiffPolynomial:
        out = self.constant
        for v, c in self.coefficients:
            out = out + c * DiffPolynomial.from_jet_variable(signature, v)
        return out


def to_affine_rows(system: DiffSystem) -> list[AffineRow]:
    """Faithful matrix encoding of a linear system; round-trips exactly."""
    rows = []
    for eq in system.equations:
        if not eq.is_linear:
            raise NonLinearSystemError(
                "system is not affine in the jet variables")
        coeffs: dict[JetVariable, DiffPolynomial] = {}
        const = DiffPolynomial.zero(system.signature)
        for mono, c in eq.items():
            xpart = DiffPolynomial(
                system.signature,
                {Monomial.make(dict(mono.x_powers), None): c})
            if mono.jet_degree == 0:
                const = const + xpart
            else:
                (v, _e), = mono.jet_powers
                coeffs[v] = coeffs.get(v, DiffPolynomial.zero(system.signature)) + xpart
        items = tuple(sorted(coeffs.items(), key=lambda vc: vc[0].sort_key, reverse=True))
        rows.append(AffineRow(items, const))
    return rows


def row_to_polynomial(signature: BundleSignature, row: Mapping) -> DiffPolynomial:
    out = DiffPolynomial.zero(signature)
    for k, c in row.items():
        if k is None:
            out = out + c
        else:
            out = out + c * DiffPolynomial.from_jet_variable(signature, k)
    return out


def system_columns(system: DiffSystem, order: int | None = None) -> list[JetVariable]:
    """Jet-variable columns up to the given order, highest first."""
    return jet_variables(system.signature, system.order if order is None else order)


def echelon_of(system: DiffSystem) -> EchelonResult:
    rows = [r.as_row() for r in to_affine_rows(system)]
    return row_echelon(rows, system_columns(system))


def prolong(system: DiffSystem, k: int) -> DiffSystem:
    """Adjoin every D_J of every equation for |J| <= k.

    The result's declared order is n + k and its provenance records the
    base system, so completion traces can certify membership later.
    """
    if k < 0:
        raise ValueError("prolongation depth must be nonnegative")
    if k == 0:
        return system
    out: list[DiffPolynomial] = list(system.equations)
    frontier: list[tuple[MultiIndex, DiffPolynomial]] = [
        (MultiIndex.zero(system.signature.p), eq) for eq in system.equations
    ]
    for _level in range(k):
        nxt: list[tuple[MultiIndex, DiffPolynomial]] = []
        for index, poly in frontier:
            for i, child in iter_index_children(index):
                dp = poly.formal_derivative(i)
                nxt.append((child, dp))
                out.append(dp)
        frontier = nxt
    return DiffSystem(system.signature, out, system.order + k,
                      provenance=Provenance(system, k))


def syntactic_project(system: DiffSystem, j: int) -> DiffSystem:
    """Keep the equations already living on the (n-j)-th jet space."""
    if not 0 <= j <= system.order:
        raise ValueError(f"projection level {j} out of range 0..{system.order}")
    if j == 0:
        return system
    target = system.order - j
    kept = [eq for eq in system.equations
            if eq.order is None or eq.order <= target]
    if not kept:
        raise EmptyProjectionError(
            f"projection to order {target} keeps no equations: "
            "it is the whole lower jet space")
    return DiffSystem(system.signature, kept, target)


def project_linear(system: DiffSystem, j: int) -> DiffSystem:
    """Eliminate, then keep echelon rows free of jet variables above n-j.

    Unlike the syntactic filter this finds combinations of equations that
    drop in order, so it can reveal integrability conditions. Row echelon is
    forward-only: rows that are kept are not reduced against one another,
    which keeps originals recognizable in the output.
    """
    if not system.is_linear:
        raise NonLinearSystemError("generic projection needs a linear system")
    if not 0 <= j <= system.order:
        raise ValueError(f"projection level {j} out of range 0..{system.order}")
    target = system.order - j
    ech = echelon_of(system)
    kept: list[DiffPolynomial] = []
    for row in ech.rows + ech.leftover:
        if all(k is None or k.order <= target for k in row):
            kept.append(row_to_polynomial(system.signature, row))
    if not kept:
        raise EmptyProjectionError(
            f"projection to order {target} keeps no equations: "
            "it is the whole lower jet space")
    return DiffSystem(system.signature, kept, target)


def integrability_conditions(system: DiffSystem) -> list[DiffPolynomial]:
    """Equations of the projected prolongation missing from the row space.

    Empty exactly when a single prolongation/projection returns the system.
    """
    if not system.is_linear:
        raise NonLinearSystemError("integrability extraction needs a linear system")
    projected = project_linear(prolong(system, 1), 1)
    ech = echelon_of(system)
    rows = {eq: r.as_row() for eq, r in zip(projected.equations,
                                            to_affine_rows(projected))}
    return [eq for eq, row in rows.items() if not in_row_space(row, ech)]


@dataclass(frozen=True)
class JacobiBlocks:
    """Jacobian of the once-prolonged system, in its four natural blocks.

    Rows are the formal derivatives D_i of each equation followed by the
    original equations; ``row_labels`` holds (equation position, direction)
    with direction None for originals. Columns are all jet variables up to
    order n+1, highest first. The bottom-right block (originals against
    top-order columns) is identically zero.
    """

    system: DiffSystem
    row_labels: tuple[tuple[int, int | None], ...]
    row_polys: tuple[DiffPolynomial, ...]
    columns: tuple[JetVariable, ...]

    def entry(self, row: int, column: JetVariable) -> DiffPolynomial:
        return self.row_polys[row].partial_jet(column)

    def matrix(self) -> list[list[DiffPolynomial]]:
        return [[self.entry(r, c) for c in self.columns]
                for r in range(len(self.row_polys))]

    def block(self, part: str) -> list[list[DiffPolynomial]]:
        n = self.system.order
        top = [r for r, (_, d) in enumerate(self.row_labels) if d is not None]
        bottom = [r for r, (_, d) in enumerate(self.row_labels) if d is None]
        low = [c for c in self.columns if c.order <= n]
        high = [c for c in self.columns if c.order == n + 1]
        rows, cols = {
            "top_left": (top, low), "top_right": (top, high),
            "bottom_left": (bottom, low), "bottom_right": (bottom, high),
        }[part]
        return [[self.entry(r, c) for c in cols] for r in rows]


def jacobi_matrix(system: DiffSystem) -> JacobiBlocks:
    labels: list[tuple[int, int | None]] = []
    polys: list[DiffPolynomial] = []
    for nu, eq in enumerate(system.equations):
        for i in range(1, system.signature.p + 1):
            labels.append((nu, i))
            polys.append(eq.formal_derivative(i))
    for nu, eq in enumerate(system.equations):
        labels.append((nu, None))
        polys.append(eq)
    columns = tuple(jet_variables(system.signature, system.order + 1))
    return JacobiBlocks(system, tuple(labels), tuple(polys), columns)


def rank_of(system: DiffSystem) -> int:
    """Generic rank of the system's Jacobian with respect to all jets.

    For nonlinear systems the jet variables in the entries are treated as
    independent indeterminates over the fraction field.
    """
    rows = []
    for eq in system.equations:
        row = {}
        for v in eq.jet_variables():
            d = eq.partial_jet(v)
            if not d.is_zero:
                row[v] = d
        rows.append(row)
    ech = row_echelon(rows, system_columns(system), generic=True)
    return ech.rank


def dim_of(system: DiffSystem) -> int:
    sig = system.signature
    return jet_dim(sig.p, sig.q, system.order) - rank_of(system)


def equals_generic(first: DiffSystem, second: DiffSystem) -> bool:
    """Row-space equality of two linear systems over Q(x)."""
    if first.signature != second.signature:
        raise SignatureMismatchError("systems live over different signatures")
    if first.order != second.order:
        raise ValueError("row-space comparison needs equal declared orders")
    if not (first.is_linear and second.is_linear):
        raise NonLinearSystemError("row-space equality needs linear systems")
    ech1, ech2 = echelon_of(first), echelon_of(second)
    rows1 = [r.as_row() for r in to_affine_rows(first)]
    rows2 = [r.as_row() for r in to_affine_rows(second)]
    return (all(in_row_space(r, ech2) for r in rows1)
            and all(in_row_space(r, ech1) for r in rows2))


def autoreduce_linear(system: DiffSystem) -> DiffSystem:
    """Row-space-equal presentation with each pivot fully back-reduced."""
    if not system.is_linear:
        raise NonLinearSystemError("autoreduction needs a linear system")
    ech = echelon_of(system)
    final: list[tuple[dict, JetVariable]] = []
    for row, col in reversed(list(zip(ech.rows, ech.pivots))):
        r = dict(row)
        for frow, fcol in final:
            if fcol in r:
                rv, pv = r[fcol], frow[fcol]
                r = {k: r.get(k, 0) * pv - frow.get(k, 0) * rv
                     for k in set(r) | set(frow)}
                r = normalize_row(r)
        final.append((r, col))
    polys = [row_to_polynomial(system.signature, r) for r, _ in reversed(final)]
    polys.extend(row_to_polynomial(system.signature, r) for r in ech.leftover)
    return DiffSystem(system.signature, polys, system.order,
                      provenance=system.provenance)


def invert_matrix(matrix: Sequence[Sequence[Fraction | int]]) -> list[list[Fraction]]:
    """Exact inverse of a square rational matrix; raises on singular input."""
    p = len(matrix)
    if any(len(row) != p for row in matrix):
        raise ValueError("matrix is not square")
    aug = [[Fraction(matrix[r][c]) for c in range(p)]
           + [Fraction(1 if c == r else 0) for c in range(p)]
           for r in range(p)]
    for col in range(p):
        piv = next((r for r in range(col, p) if aug[r][col]), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(p):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[p:] for row in aug]


def change_coordinates(system: DiffSystem,
                       matrix: Sequence[Sequence[Fraction | int]]) -> DiffSystem:
    """Rewrite a linear system in coordinates x' = A x.

    Derivatives transform through the chain rule: a jet variable of order m
    becomes the m-fold application of the directional operators
    T_i = sum_j A_ji D_j' to the order-0 jet. Base-coordinate dependence is
    composed with x = A^(-1) x'. The coordinate names keep denoting the new
    frame, and solution sets correspond bijectively under the map.
    """
    if not system.is_linear:
        raise NonLinearSystemError("coordinate changes are provided for linear systems")
    sig = system.signature
    p = sig.p
    A = [[Fraction(matrix[r][c]) for c in range(p)] for r in range(p)]
    A_inv = invert_matrix(A)

    jet_cache: dict[JetVariable, DiffPolynomial] = {}

    def transform_jet(v: JetVariable) -> DiffPolynomial:
        if v in jet_cache:
            return jet_cache[v]
        out = DiffPolynomial.jet(sig, v.alpha, MultiIndex.zero(p))
        for i, e in enumerate(v.index.exponents, start=1):
            for _ in range(e):
                acc = DiffPolynomial.zero(sig)
                for j in range(1, p + 1):
                    c = A[j - 1][i - 1]
                    if c:
                        acc = acc + out.formal_derivative(j) * c
                out = acc
        jet_cache[v] = out
        return out

    x_map = {}
    for i in range(1, p + 1):
        acc = DiffPolynomial.zero(sig)
        for j in range(1, p + 1):
            c = A_inv[i - 1][j - 1]
            if c:
                acc = acc + DiffPolynomial.x(sig, j) * c
        x_map[i] = acc

    new_eqs = []
    for eq in system.equations:
        jmap = {v: transform_jet(v) for v in eq.jet_variables()}
        new_eqs.append(eq.substitute_jets(jmap).substitute_x(x_map))
    return DiffSystem(sig, new_eqs, system.order)
