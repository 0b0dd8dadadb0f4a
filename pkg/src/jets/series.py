"""Truncated formal power-series solutions, built order by order.

The coefficient of the series at multi-index J is the value of the jet
variable u^alpha_J at the expansion point, so solving the system prolonged
to each order pins down the principal coefficients from the parametric ones.
Pivot priority is class-major: among the jets an equation links, the one
with the highest-class derivative direction is solved for, which leaves the
classical initial data (e.g. the pure-x jets of an evolution equation)
parametric. All arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .diffpoly import DiffPolynomial
from .errors import (InconsistentAtPointError, InconsistentOrderError,
                     InconsistentSeedError, NonLinearSystemError)
from .jetspace import BundleSignature, JetVariable, MultiIndex, jet_variables
from .linalg import row_echelon
from .systems import DiffSystem, prolong, to_affine_rows


@dataclass(frozen=True)
class PolynomialFunction:
    """One jet-free polynomial in the base coordinates per dependent variable."""

    signature: BundleSignature
    components: tuple[DiffPolynomial, ...]

    def __post_init__(self):
        if len(self.components) != self.signature.q:
            raise ValueError("need one component per dependent variable")
        for c in self.components:
            if not c.is_x_poly:
                raise ValueError("components must be free of jet variables")

    @classmethod
    def make(cls, signature: BundleSignature,
             components: Mapping[str, DiffPolynomial] | Sequence[DiffPolynomial]
             ) -> "PolynomialFunction":
        if isinstance(components, Mapping):
            comps = tuple(components[name] for name in signature.dependent)
        else:
            comps = tuple(components)
        return cls(signature, comps)

    def jet_value(self, v: JetVariable) -> DiffPolynomial:
        """The x-polynomial playing the role of u^alpha_J on the graph of f."""
        out = self.components[v.alpha - 1]
        for i, e in enumerate(v.index.exponents, start=1):
            for _ in range(e):
                out = out.partial_x(i)
        return out


def check_solution(system: DiffSystem, f: PolynomialFunction) -> bool:
    """Substitute the prolonged graph of f and test identical vanishing.

    Works for nonlinear systems as well; the test is exact equality of
    polynomials in the base coordinates.
    """
    for eq in system.equations:
        replacements = {v: f.jet_value(v) for v in eq.jet_variables()}
        if not eq.substitute_jets(replacements).is_zero:
            return False
    return True


@dataclass
class OrderPartition:
    principal: tuple[JetVariable, ...]
    parametric: tuple[JetVariable, ...]


@dataclass
class SeriesSolution:
    """Coefficient table a^alpha_J for |J| <= N about a base point.

    ``coefficients[alpha][J]`` is exact; ``partition[m]`` splits the order-m
    jets into principal (pinned by the system) and parametric (chosen).
    """

    signature: BundleSignature
    point: tuple[Fraction, ...]
    truncation: int
    coefficients: dict[int, dict[MultiIndex, Fraction]]
    partition: dict[int, OrderPartition]

    def coefficient(self, v: JetVariable) -> Fraction:
        return self.coefficients[v.alpha][v.index]

    def to_polynomial(self) -> PolynomialFunction:
        """The truncated series sum_{|J|<=N} a_J / J! (x - x0)^J."""
        sig = self.signature
        shifted = [DiffPolynomial.x(sig, i) - self.point[i - 1]
                   for i in range(1, sig.p + 1)]
        comps = []
        for alpha in range(1, sig.q + 1):
            acc = DiffPolynomial.zero(sig)
            for index, a in self.coefficients[alpha].items():
                if not a:
                    continue
                term = DiffPolynomial.constant(sig, Fraction(a, index.factorial()))
                for i, e in enumerate(index.exponents, start=1):
                    if e:
                        term = term * shifted[i - 1] ** e
                acc = acc + term
            comps.append(acc)
        return PolynomialFunction(sig, tuple(comps))


def series_eval(solution: SeriesSolution, x: Sequence[Fraction | int]
                ) -> dict[int, Fraction]:
    """Exact value of the truncated series per dependent variable."""
    sig = solution.signature
    if len(x) != sig.p:
        raise ValueError(f"point needs {sig.p} coordinates")
    deltas = [Fraction(xi) - x0 for xi, x0 in zip(x, solution.point)]
    out = {}
    for alpha in range(1, sig.q + 1):
        total = Fraction(0)
        for index, a in solution.coefficients[alpha].items():
            if not a:
                continue
            val = Fraction(a, index.factorial())
            for d, e in zip(deltas, index.exponents):
                if e:
                    val *= d ** e
            total += val
        out[alpha] = total
    return out


def _class_major_columns(signature: BundleSignature, order: int,
                         exact: bool) -> list[JetVariable]:
    cols = jet_variables(signature, order, exact=exact)
    cols.sort(key=lambda v: v.class_major_key, reverse=True)
    return cols


def _initial_rows(system: DiffSystem, point: Sequence[Fraction]) -> list[dict]:
    rows = []
    for arow in to_affine_rows(system):
        row: dict = {}
        for v, c in arow.coefficients:
            val = c.evaluate(x_values=point)
            if val:
                row[v] = val
        const = arow.constant.evaluate(x_values=point)
        if const:
            row[None] = const
        rows.append(row)
    return rows


def _round_equations(system: DiffSystem, m: int) -> list[DiffPolynomial]:
    return [eq for eq in prolong(system, m - system.order).equations
            if eq.order == m]


def _round_row(eq: DiffPolynomial, m: int, point: Sequence[Fraction],
               known: Mapping[JetVariable, Fraction] | None) -> dict:
    """Affine row of a prolonged equation in the order-m unknowns.

    Prolonged equations are linear in their top-order jets, so the partials
    by those jets are coefficient polynomials of lower order; with ``known``
    lower coefficients substituted the row is numeric.
    """
    row: dict = {}
    tops = [v for v in eq.jet_variables() if v.order == m]
    jv = dict(known) if known is not None else {}
    for v in tops:
        c = eq.partial_jet(v).evaluate(x_values=point, jet_values=jv)
        if c:
            row[v] = c
    if known is not None:
        for v in tops:
            jv[v] = Fraction(0)
        const = eq.evaluate(x_values=point, jet_values=jv)
        if const:
            row[None] = const
    return row


def partition_derivatives(system: DiffSystem, point: Sequence[Fraction | int],
                          truncation: int) -> dict[int, OrderPartition]:
    """Principal/parametric split of the jets of each order up to N.

    Orders up to n are partitioned by one joint elimination of the system's
    equations evaluated at the point (their pivots may sit at any order);
    each later order m gets the pivots of the order-m slice of the
    prolongation.
    """
    if not system.is_linear:
        raise NonLinearSystemError("the partition is defined for linear systems")
    point = _check_point(system.signature, point)
    n = system.order
    columns = _class_major_columns(system.signature, n, exact=False)
    ech = row_echelon(_initial_rows(system, point), columns)
    if ech.inconsistent:
        raise InconsistentAtPointError(
            "an equation reduces to a nonzero constant at the expansion "
            "point; the point does not lie on the equation manifold")
    pivots = set(ech.pivots)
    partition: dict[int, OrderPartition] = {}
    for m in range(0, min(n, truncation) + 1):
        vs = jet_variables(system.signature, m, exact=True)
        partition[m] = OrderPartition(
            tuple(v for v in vs if v in pivots),
            tuple(v for v in vs if v not in pivots))
    for m in range(n + 1, truncation + 1):
        cols = _class_major_columns(system.signature, m, exact=True)
        rows = [_round_row(eq, m, point, None) for eq in _round_equations(system, m)]
        ech_m = row_echelon(rows, cols)
        pm = set(ech_m.pivots)
        partition[m] = OrderPartition(
            tuple(v for v in cols if v in pm),
            tuple(v for v in cols if v not in pm))
    return partition


def _check_point(signature: BundleSignature,
                 point: Sequence[Fraction | int]) -> tuple[Fraction, ...]:
    pt = tuple(Fraction(v) for v in point)
    if len(pt) != signature.p:
        raise ValueError(f"expansion point needs {signature.p} coordinates")
    return pt


def _solve_block(rows: list[dict], columns: list[JetVariable],
                 assigned: Mapping[JetVariable, Fraction],
                 inconsistency: Exception) -> tuple[dict[JetVariable, Fraction],
                                                    list[JetVariable]]:
    """Solve an affine block exactly; returns values and the pivot list."""
    ech = row_echelon(rows, columns)
    if ech.inconsistent:
        raise inconsistency
    values: dict[JetVariable, Fraction] = {}
    for v in columns:
        if v not in ech.pivots:
            values[v] = Fraction(assigned.get(v, 0))
    for row, pivot in reversed(list(zip(ech.rows, ech.pivots))):
        total = Fraction(row.get(None, 0))
        for k, c in row.items():
            if k is not None and k != pivot:
                total += c * values[k]
        values[pivot] = -total / row[pivot]
    return values, list(ech.pivots)


def solve_series(system: DiffSystem, point: Sequence[Fraction | int],
                 truncation: int,
                 parametric_values: Mapping[JetVariable, Fraction | int] | None = None,
                 seed: Mapping[JetVariable, Fraction | int] | None = None
                 ) -> SeriesSolution:
    """Construct the coefficient table of a truncated series solution.

    Linear systems need no seed: the coefficients of order <= n come from
    one joint solve with parametric values filled in (default 0). Nonlinear
    systems require ``seed`` to fix every coefficient of order <= n and to
    satisfy every equation at the point; the remaining orders are genuinely
    linear solves either way.

    Raises ``InconsistentOrderError`` when some order has no solution: the
    input was not formally integrable, and completion should run first.
    """
    point = _check_point(system.signature, point)
    if truncation < system.order:
        raise ValueError("truncation order must be at least the system order")
    parametric = {v: Fraction(c) for v, c in (parametric_values or {}).items()}
    n = system.order
    sig = system.signature

    coeffs: dict[JetVariable, Fraction] = {}
    partition: dict[int, OrderPartition] = {}
    parametric_slots: set[JetVariable] = set()

    if seed is not None:
        needed = jet_variables(sig, n)
        missing = [v for v in needed if v not in seed]
        if missing:
            names = ", ".join(v.name(sig) for v in missing[:5])
            raise InconsistentSeedError(
                f"seed must fix every coefficient of order <= {n}; missing {names}")
        for v in needed:
            coeffs[v] = Fraction(seed[v])
        for eq in system.equations:
            if eq.evaluate(x_values=point, jet_values=coeffs) != 0:
                raise InconsistentSeedError(
                    "seed violates an equation at the expansion point")
        for m in range(0, n + 1):
            vs = tuple(jet_variables(sig, m, exact=True))
            partition[m] = OrderPartition((), vs)
            parametric_slots.update(vs)
    else:
        if not system.is_linear:
            raise NonLinearSystemError(
                "a nonlinear system needs a seed fixing all coefficients of "
                f"order <= {n}")
        columns = _class_major_columns(sig, n, exact=False)
        values, pivots = _solve_block(
            _initial_rows(system, point), columns, parametric,
            InconsistentAtPointError(
                "an equation reduces to a nonzero constant at the expansion "
                "point; the point does not lie on the equation manifold"))
        coeffs.update(values)
        pivot_set = set(pivots)
        for m in range(0, n + 1):
            vs = jet_variables(sig, m, exact=True)
            partition[m] = OrderPartition(
                tuple(v for v in vs if v in pivot_set),
                tuple(v for v in vs if v not in pivot_set))
            parametric_slots.update(partition[m].parametric)

    for m in range(n + 1, truncation + 1):
        cols = _class_major_columns(sig, m, exact=True)
        rows = [_round_row(eq, m, point, coeffs)
                for eq in _round_equations(system, m)]
        values, pivots = _solve_block(rows, cols, parametric,
                                      InconsistentOrderError(m))
        coeffs.update(values)
        pivot_set = set(pivots)
        partition[m] = OrderPartition(
            tuple(v for v in cols if v in pivot_set),
            tuple(v for v in cols if v not in pivot_set))
        parametric_slots.update(partition[m].parametric)

    stray = [v for v in parametric if v not in parametric_slots]
    if stray:
        names = ", ".join(v.name(sig) for v in sorted(
            stray, key=lambda v: v.sort_key)[:5])
        raise ValueError(
            f"assigned values for non-parametric jet variables: {names} "
            "(principal derivatives are fixed by the system; "
            "list the parametric ones first)")

    table: dict[int, dict[MultiIndex, Fraction]] = {
        alpha: {} for alpha in range(1, sig.q + 1)}
    for v, val in coeffs.items():
        table[v.alpha][v.index] = val
    return SeriesSolution(sig, point, truncation, table, partition)


def residual_order(system: DiffSystem,
                   solution: SeriesSolution) -> list[int | None]:
    """Lowest total degree (about the base point) of each residual.

    ``None`` means the equation vanishes identically on the truncated
    series. A successfully solved series yields residual order at least
    N - n + 1 on every equation.
    """
    f = solution.to_polynomial()
    sig = system.signature
    shift = {i: DiffPolynomial.x(sig, i) + solution.point[i - 1]
             for i in range(1, sig.p + 1)}
    out: list[int | None] = []
    for eq in system.equations:
        residual = eq.substitute_jets(
            {v: f.jet_value(v) for v in eq.jet_variables()})
        centered = residual.substitute_x(shift)
        if centered.is_zero:
            out.append(None)
        else:
            out.append(min(sum(e for _, e in mono.x_powers)
                           for mono in centered.terms))
    return out
