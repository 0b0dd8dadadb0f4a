"""Shared fixtures and builders for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from jets import (BundleSignature, DiffPolynomial, DiffSystem, JetVariable,
                  MultiIndex, parse_polynomial)


@pytest.fixture
def sig_xyz():
    return BundleSignature(["x", "y", "z"], ["u"])


@pytest.fixture
def sig_xy():
    return BundleSignature(["x", "y"], ["u"])


@pytest.fixture
def sig_xyt():
    return BundleSignature(["x", "y", "t"], ["u"])


@pytest.fixture
def sig_xt():
    return BundleSignature(["x", "t"], ["u"])


def P(sig: BundleSignature, text: str) -> DiffPolynomial:
    return parse_polynomial(sig, text)


def system(sig: BundleSignature, *exprs: str, order: int | None = None) -> DiffSystem:
    polys = [parse_polynomial(sig, e) for e in exprs]
    if order is None:
        order = max((p.order or 0) for p in polys)
    return DiffSystem(sig, polys, order)


def transport3d(sig: BundleSignature) -> DiffSystem:
    """The first-order system whose hidden condition is u_x = 0."""
    return system(sig, "u_z + y*u_x", "u_y")


def wave2d(sig: BundleSignature) -> DiffSystem:
    return system(sig, "u_tt - u_xx - u_yy")


# -- random generation --------------------------------------------------------


def random_linear_system(rng: random.Random, max_p: int = 3, max_q: int = 2,
                         max_order: int = 2, coeff_degree: int = 1) -> DiffSystem:
    """Seeded linear system with polynomial coefficients of small degree."""
    p = rng.randint(1, max_p)
    q = rng.randint(1, max_q)
    xs = ["x", "y", "z"][:p]
    us = ["u", "v"][:q]
    sig = BundleSignature(xs, us)
    n = rng.randint(1, max_order)
    indices = []
    for m in range(0, n + 1):
        from jets import enumerate_indices
        indices.extend(enumerate_indices(p, m))
    equations = []
    for _ in range(rng.randint(1, 3)):
        poly = DiffPolynomial.zero(sig)
        for _ in range(rng.randint(1, 3)):
            alpha = rng.randint(1, q)
            index = rng.choice(indices)
            coeff = DiffPolynomial.constant(sig, rng.choice([-2, -1, 1, 2, 3]))
            if coeff_degree >= 1 and rng.random() < 0.5:
                coeff = coeff + DiffPolynomial.x(sig, rng.randint(1, p)) \
                    * rng.choice([-1, 1, 2])
            poly = poly + coeff * DiffPolynomial.jet(sig, alpha, index)
        if rng.random() < 0.2:
            poly = poly + rng.randint(-2, 2)
        if not poly.is_zero and poly.order is not None:
            equations.append(poly)
    if not equations:
        equations = [DiffPolynomial.jet(sig, 1, MultiIndex([1] + [0] * (p - 1)))]
    return DiffSystem(sig, equations, n)


# -- hypothesis strategies -----------------------------------------------------

_SIG2 = BundleSignature(["x", "y"], ["u"])


def multi_indices(p: int = 2, max_order: int = 3):
    return st.lists(st.integers(min_value=0, max_value=max_order),
                    min_size=p, max_size=p).map(MultiIndex)


def jet_vars(signature: BundleSignature = _SIG2, max_order: int = 2):
    return st.tuples(
        st.integers(min_value=1, max_value=signature.q),
        multi_indices(signature.p, max_order),
    ).map(lambda t: JetVariable(*t))


@st.composite
def diff_polynomials(draw, signature: BundleSignature = _SIG2,
                     max_terms: int = 4, max_order: int = 2):
    from jets.diffpoly import Monomial
    terms = {}
    for _ in range(draw(st.integers(min_value=1, max_value=max_terms))):
        xs = {}
        for i in range(1, signature.p + 1):
            e = draw(st.integers(min_value=0, max_value=2))
            if e:
                xs[i] = e
        js = {}
        for _ in range(draw(st.integers(min_value=0, max_value=2))):
            v = draw(jet_vars(signature, max_order))
            js[v] = js.get(v, 0) + draw(st.integers(min_value=1, max_value=2))
        coeff = Fraction(draw(st.integers(min_value=-4, max_value=4)),
                         draw(st.integers(min_value=1, max_value=3)))
        mono = Monomial.make(xs, js)
        terms[mono] = terms.get(mono, Fraction(0)) + coeff
    return DiffPolynomial(signature, terms)
