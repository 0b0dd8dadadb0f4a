"""Sparse exact row echelon over Q, Q(x), or fully generic entries.

Rows are sparse maps from column keys to entries. Entries are either
``Fraction`` or jet-free/jet-bearing ``DiffPolynomial`` values; elimination
uses cross-multiplication only, so everything stays polynomial. Division by
nonzero polynomials is legitimate over the rational-function field of a
generic base point, and shows up here as content removal between steps.

The key ``None`` denotes the inhomogeneous (constant) column. It is carried
through every row operation and eliminated after all proper columns, so an
inconsistent affine row ("c = 0") still lands in the echelon, but it never
counts toward the rank.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

from .diffpoly import DiffPolynomial

Row = dict


def _is_zero(v) -> bool:
    if isinstance(v, DiffPolynomial):
        return v.is_zero
    return v == 0


def _rational_content(coeffs: list[Fraction]) -> Fraction:
    num = 0
    den = 1
    for c in coeffs:
        num = math.gcd(num, abs(c.numerator))
        den = den * c.denominator // math.gcd(den, c.denominator)
    return Fraction(num, den) if num else Fraction(1)


def normalize_row(row: Row, divide_jet_content: bool = False) -> Row:
    """Scale a row to a canonical primitive representative.

    Removes the common rational content, any common x-monomial factor across
    all entries, and (in generic rank mode only) common jet-monomial factors.
    The first nonzero coefficient is made positive.
    """
    row = {k: v for k, v in row.items() if not _is_zero(v)}
    if not row:
        return row
    sample = next(iter(row.values()))
    if isinstance(sample, Fraction):
        content = _rational_content(list(row.values()))
        lead = min(row.items(), key=_row_key_order)[1]
        if lead < 0:
            content = -content
        return {k: v / content for k, v in row.items()}

    coeffs = [c for poly in row.values() for c in poly.terms.values()]
    content = _rational_content(coeffs)
    mono: dict[int, int] | None = None
    jet_mono: dict | None = None
    for poly in row.values():
        pc = poly.x_monomial_content()
        mono = pc if mono is None else {i: min(e, pc.get(i, 0))
                                        for i, e in mono.items() if pc.get(i, 0)}
        if divide_jet_content:
            jc = _jet_monomial_content(poly)
            jet_mono = jc if jet_mono is None else {v: min(e, jc.get(v, 0))
                                                    for v, e in jet_mono.items() if jc.get(v, 0)}
    out = {}
    lead_sign = None
    for k, poly in sorted(row.items(), key=_row_key_order):
        q = poly / content
        if mono:
            q = q.divide_x_monomial(mono)
        if divide_jet_content and jet_mono:
            q = _divide_jet_monomial(q, jet_mono)
        if lead_sign is None:
            lead_sign = 1 if q.leading_coefficient() > 0 else -1
        out[k] = q * lead_sign
    return out


def _row_key_order(item):
    # None (constant column) sorts last; jet columns descending by sort key
    k = item[0]
    if k is None:
        return (1, 0, (), 0)
    order, letters, neg_alpha = k.sort_key
    return (0, -order, tuple(-x for x in letters), -neg_alpha)


def _jet_monomial_content(poly: DiffPolynomial) -> dict:
    content = None
    for mono in poly.terms:
        js = dict(mono.jet_powers)
        if content is None:
            content = js
        else:
            content = {v: min(e, js.get(v, 0)) for v, e in content.items() if js.get(v, 0)}
        if not content:
            return {}
    return content or {}


def _divide_jet_monomial(poly: DiffPolynomial, content: Mapping) -> DiffPolynomial:
    from .diffpoly import Monomial
    if not content:
        return poly
    acc = {}
    for mono, coeff in poly.terms.items():
        js = dict(mono.jet_powers)
        for v, e in content.items():
            js[v] -= e
            if not js[v]:
                del js[v]
        acc[Monomial.make(dict(mono.x_powers), js)] = coeff
    return DiffPolynomial(poly.signature, acc)


@dataclass
class EchelonResult:
    """Forward row echelon form (no back-reduction).

    ``rows`` are the pivot rows in pivot-column order; ``pivots`` the matching
    column keys, where the key ``None`` marks a constant-only row (the affine
    system then has no solution). ``leftover`` holds nonzero rows whose keys
    all lie outside the eliminated columns. ``rank`` counts jet pivots only:
    it is the rank of the coefficient (Jacobian) part.
    """

    rows: list[Row] = field(default_factory=list)
    pivots: list[Hashable] = field(default_factory=list)
    leftover: list[Row] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return sum(1 for p in self.pivots if p is not None)

    @property
    def inconsistent(self) -> bool:
        return any(p is None for p in self.pivots)


def row_echelon(rows: Sequence[Mapping], columns: Sequence[Hashable],
                generic: bool = False) -> EchelonResult:
    """Eliminate ``rows`` along ``columns`` in the given order.

    Pivot choice is deterministic: first column (in ``columns`` order) with a
    nonzero entry, and among candidate rows the lowest original row index.
    The constant column ``None`` is eliminated last, so a row reduced to a
    bare constant still enters the echelon (with pivot ``None``). Keys
    outside ``columns`` (lower-order jets during a restricted elimination)
    ride along passively.
    """
    work: list[tuple[int, Row]] = [
        (i, normalize_row(dict(r), generic)) for i, r in enumerate(rows)
    ]
    work = [(i, r) for i, r in work if r]
    result = EchelonResult()
    for col in list(columns) + [None]:
        candidates = [(i, r) for i, r in work if col in r]
        if not candidates:
            continue
        pi, pivot_row = min(candidates, key=lambda ir: ir[0])
        result.rows.append(pivot_row)
        result.pivots.append(col)
        reduced: list[tuple[int, Row]] = []
        pv = pivot_row[col]
        for i, r in work:
            if i == pi:
                continue
            if col in r:
                rv = r[col]
                new = {}
                for k in set(r) | set(pivot_row):
                    val = r.get(k, 0) * pv - pivot_row.get(k, 0) * rv
                    if not _is_zero(val):
                        new[k] = val
                new = normalize_row(new, generic)
                if new:
                    reduced.append((i, new))
            else:
                reduced.append((i, r))
        work = reduced
    result.leftover = [r for _, r in sorted(work)]
    return result


def reduce_against(row: Mapping, ech: EchelonResult, generic: bool = False) -> Row:
    """Remainder of ``row`` after elimination by the echelon's pivot rows."""
    r = normalize_row(dict(row), generic)
    for pivot_row, col in zip(ech.rows, ech.pivots):
        if col in r:
            rv = r[col]
            pv = pivot_row[col]
            new = {}
            for k in set(r) | set(pivot_row):
                val = r.get(k, 0) * pv - pivot_row.get(k, 0) * rv
                if not _is_zero(val):
                    new[k] = val
            r = normalize_row(new, generic)
        if not r:
            break
    return r


def in_row_space(row: Mapping, ech: EchelonResult, generic: bool = False) -> bool:
    return not reduce_against(row, ech, generic)
