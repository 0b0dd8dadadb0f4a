"""Symbol matrices, class counts, involution test, coordinate retries."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jets import (BundleSignature, DiffPolynomial, MultiIndex,
                  NonLinearSystemError, class_signature, delta_retry,
                  enumerate_indices, multiplicative_positions, prolong,
                  symbol_involutive, symbol_of)
from tests.conftest import P, system, transport3d, wave2d


class TestSymbolOf:
    def test_wave_row(self, sig_xyt):
        sym = symbol_of(wave2d(sig_xyt))
        (row,) = sym.rows
        entries = {v.name(sig_xyt): c for v, c in row}
        assert entries == {"u_tt": P(sig_xyt, "1"), "u_xx": P(sig_xyt, "-1"),
                           "u_yy": P(sig_xyt, "-1")}
        assert len(sym.columns) == 6

    def test_transport_rows(self, sig_xyz):
        sym = symbol_of(transport3d(sig_xyz))
        rows = [{v.name(sig_xyz): c for v, c in row} for row in sym.rows]
        assert {"u_z": P(sig_xyz, "1"), "u_x": P(sig_xyz, "y")} in rows
        assert {"u_y": P(sig_xyz, "1")} in rows

    def test_low_order_equation_gives_zero_row(self, sig_xy):
        sym = symbol_of(system(sig_xy, "u", order=1))
        assert sym.rows == ((),)
        assert sym.rank == 0

    def test_column_count(self, sig_xyz):
        sym = symbol_of(system(sig_xyz, "u_xx", order=2))
        assert len(sym.columns) == 6  # q * C(n+p-1, p-1) = 1 * C(4,2)

    def test_quasilinear_symbol_is_coefficient_only(self, sig_xy):
        sym = symbol_of(system(sig_xy, "u_y - u^2"))
        assert not sym.generic

    def test_fully_nonlinear_flags_generic(self, sig_xy):
        sym = symbol_of(system(sig_xy, "u_x^2 - u"))
        assert sym.generic


class TestClassSignature:
    def test_gradient(self, sig_xyz):
        sig = class_signature(system(sig_xyz, "u_x", "u_y", "u_z"))
        assert sig.beta == (1, 1, 1)
        assert sig.sum_k_beta == 6

    def test_wave_pivot_class_three(self, sig_xyt):
        sig = class_signature(wave2d(sig_xyt))
        assert sig.beta == (0, 0, 1)
        assert sig.sum_k_beta == 3

    def test_mixed_derivative_class_one(self, sig_xy):
        sig = class_signature(system(sig_xy, "u_xy"))
        assert sig.beta == (1, 0)
        assert sig.sum_k_beta == 1

    def test_order_zero_rejected(self, sig_xy):
        with pytest.raises(ValueError):
            class_signature(system(sig_xy, "u - x"))

    def test_beta_sums_to_rank(self, sig_xyz):
        sig = class_signature(transport3d(sig_xyz))
        assert sum(sig.beta) == sig.rank == 2


class TestSymbolInvolutive:
    def test_gradient_involutive(self, sig_xyz):
        test = symbol_involutive(system(sig_xyz, "u_x", "u_y", "u_z"))
        assert test.involutive
        assert test.sum_k_beta == 6
        assert test.rank_prolonged_symbol == 6

    def test_transport_symbol(self, sig_xyz):
        # classes 3 and 2 give the count 5; the prolonged symbol has six rows
        # but only five independent ones (the 6x6 minor vanishes identically),
        # so the symbol itself is involutive and the failure of involution
        # for this system comes from the projection test alone
        test = symbol_involutive(transport3d(sig_xyz))
        assert test.sum_k_beta == 5
        assert test.rank_prolonged_symbol == 5
        assert test.involutive

    def test_transport_prolonged_symbol_rank_oracle(self, sig_xyz):
        # determinant oracle: the 6x6 top-order coefficient matrix of the
        # prolonged system is singular for every value of y
        from tests.test_linalg import det
        prolonged = prolong(transport3d(sig_xyz), 1)
        columns = [v for v in symbol_of(prolonged).columns]
        rows = []
        for row in symbol_of(prolonged).rows:
            if row:
                entries = dict(row)
                rows.append(entries)
        for y_val in (Fraction(1), Fraction(2), Fraction(7, 3)):
            mat = [[r.get(c, DiffPolynomial.zero(sig_xyz))
                    .evaluate(x_values={1: 0, 2: y_val, 3: 0}) for c in columns]
                   for r in rows]
            assert len(mat) == 6
            assert det(mat) == 0

    def test_mixed_derivative_not_involutive(self, sig_xy):
        test = symbol_involutive(system(sig_xy, "u_xy"))
        assert not test.involutive
        assert test.sum_k_beta == 1
        assert test.rank_prolonged_symbol == 2
        assert test.delta_suspect

    def test_invariant_under_presentation(self, sig_xyz):
        a = system(sig_xyz, "u_x", "u_y", "u_z")
        b = system(sig_xyz, "3*u_z", "u_y", "u_x")
        assert symbol_involutive(a) == symbol_involutive(b)


class TestMultiplicativePositions:
    def test_class_one(self):
        assert multiplicative_positions(1, 3) == [1]

    def test_class_p(self):
        assert multiplicative_positions(3, 3) == [1, 2, 3]

    def test_middle(self):
        assert multiplicative_positions(2, 3) == [1, 2]

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            multiplicative_positions(0, 3)
        with pytest.raises(ValueError):
            multiplicative_positions(4, 3)


class TestMultiplicativePivotInjectivity:
    @settings(max_examples=60)
    @given(st.sets(st.lists(st.integers(min_value=0, max_value=3),
                            min_size=3, max_size=3).map(tuple),
                   min_size=1, max_size=6))
    def test_children_distinct(self, exps):
        indices = [MultiIndex(e) for e in exps if sum(e) > 0]
        children = []
        for j in indices:
            for i in multiplicative_positions(j.class_, 3):
                children.append(j.increment(i))
        assert len(children) == len(set(children))


class TestDeltaRetry:
    def test_mixed_derivative_random_linear(self, sig_xy):
        result = delta_retry(system(sig_xy, "u_xy"), strategy="random-linear",
                             seed=1)
        assert result.changed
        assert result.signature.sum_k_beta == 2
        assert symbol_involutive(result.system).involutive

    def test_gradient_identity(self, sig_xyz):
        result = delta_retry(system(sig_xyz, "u_x", "u_y", "u_z"))
        assert not result.changed
        identity = tuple(tuple(Fraction(1 if r == c else 0) for c in range(3))
                         for r in range(3))
        assert result.transform == identity

    def test_wave_pure_powers_any_naming(self):
        # pure second derivatives in every variable: the pivot lands on a
        # class-3 column under every permutation, so identity is returned
        sig = BundleSignature(["t", "x", "y"], ["u"])
        s = system(sig, "u_tt - u_xx - u_yy")
        result = delta_retry(s, strategy="permutation")
        assert not result.changed
        assert class_signature(s).sum_k_beta == 3

    def test_mixed_derivative_permutations_cannot_help(self, sig_xy):
        result = delta_retry(system(sig_xy, "u_xy"), strategy="permutation")
        assert not result.changed

    def test_deterministic_given_seed(self, sig_xy):
        a = delta_retry(system(sig_xy, "u_xy"), strategy="random-linear", seed=5)
        b = delta_retry(system(sig_xy, "u_xy"), strategy="random-linear", seed=5)
        assert a.transform == b.transform
        assert a.system == b.system

    def test_nonlinear_rejected(self, sig_xy):
        with pytest.raises(NonLinearSystemError):
            delta_retry(system(sig_xy, "u_y - u^2"))

    def test_unknown_strategy(self, sig_xy):
        with pytest.raises(ValueError):
            delta_retry(system(sig_xy, "u_xy"), strategy="simulated-annealing")


class TestPurePowerProperty:
    def test_single_equation_with_pure_top_class_power(self):
        # one equation whose symbol has a nonzero entry on the pure class-p
        # column: the count is p and so is the prolonged symbol rank
        from jets import DiffSystem
        rng = random.Random(3)
        sig = BundleSignature(["x", "y", "z"], ["u"])
        pure = MultiIndex([0, 0, 2])
        others = [j for j in enumerate_indices(3, 2) if j != pure]
        for _ in range(10):
            poly = DiffPolynomial.jet(sig, 1, pure)
            for j in rng.sample(others, rng.randint(0, 3)):
                poly = poly + DiffPolynomial.jet(sig, 1, j) * rng.choice([-2, -1, 1, 2])
            test = symbol_involutive(DiffSystem(sig, [poly], 2))
            assert test.sum_k_beta == 3
            assert test.rank_prolonged_symbol == 3
            assert test.involutive
