"""Involution test, completion loop, formal integrability to finite depth."""

import pytest

from jets import (BundleSignature, DeltaSingularUnresolvedError,
                  DiffPolynomial, MaxIterationsExceededError,
                  NonLinearSystemError, PolynomialFunction, check_solution,
                  complete, equals_generic, formally_integrable_up_to,
                  is_involutive, prolong)
from tests.conftest import P, system, transport3d, wave2d


def gradient(sig):
    return system(sig, "u_x", "u_y", "u_z")


class TestIsInvolutive:
    def test_gradient(self, sig_xyz):
        report = is_involutive(gradient(sig_xyz))
        assert report.involutive
        assert report.symbol.involutive and report.projection_stable
        assert report.new_conditions == ()

    def test_transport_fails_via_projection(self, sig_xyz):
        report = is_involutive(transport3d(sig_xyz))
        assert not report.involutive
        # the symbol count is sharp here (5 = 5); the hidden first-order
        # condition is what breaks involution
        assert report.symbol.involutive
        assert not report.projection_stable
        assert P(sig_xyz, "u_x") in report.new_conditions

    def test_wave(self, sig_xyt):
        report = is_involutive(wave2d(sig_xyt))
        assert report.involutive
        assert report.symbol.sum_k_beta == 3
        assert report.symbol.rank_prolonged_symbol == 3

    def test_nonlinear_rejected(self, sig_xy):
        with pytest.raises(NonLinearSystemError):
            is_involutive(system(sig_xy, "u_y - u^2"))


class TestCompleteTransport:
    def test_reaches_involutive_gradient(self, sig_xyz):
        result = complete(transport3d(sig_xyz))
        assert result.trace.iterations <= 10
        assert is_involutive(result.system).involutive
        assert result.system.order == 1
        assert equals_generic(result.system, gradient(sig_xyz))
        assert set(result.system.equations) == {P(sig_xyz, "u_x"),
                                                P(sig_xyz, "u_y"),
                                                P(sig_xyz, "u_z")}

    def test_certificate(self, sig_xyz):
        result = complete(transport3d(sig_xyz))
        assert result.trace.certificate_ok

    def test_projection_step_records_condition(self, sig_xyz):
        result = complete(transport3d(sig_xyz))
        projected = [s for s in result.trace.steps if s.action == "projected"]
        assert projected
        assert P(sig_xyz, "u_x") in projected[0].new_conditions

    def test_constant_solutions_preserved(self, sig_xyz):
        result = complete(transport3d(sig_xyz))
        const = PolynomialFunction.make(
            sig_xyz, [DiffPolynomial.constant(sig_xyz, 7)])
        assert check_solution(transport3d(sig_xyz), const)
        assert check_solution(result.system, const)

    def test_idempotent(self, sig_xyz):
        once = complete(transport3d(sig_xyz))
        twice = complete(once.system)
        assert twice.trace.iterations == 0
        assert equals_generic(twice.system, once.system)


class TestCompleteAlreadyInvolutive:
    def test_wave_returned_unchanged(self, sig_xyt):
        s = wave2d(sig_xyt)
        result = complete(s)
        assert result.system == s
        assert result.trace.steps == []
        assert result.trace.certificate_ok


class TestCompleteDeltaSingular:
    def test_mixed_derivative_with_random_coords(self, sig_xy):
        result = complete(system(sig_xy, "u_xy"), delta_strategy="random-linear",
                          seed=1)
        assert is_involutive(result.system).involutive
        changed = [s for s in result.trace.steps if s.action == "coordinate-changed"]
        assert changed and changed[0].transform is not None
        assert result.trace.certificate_ok

    def test_mixed_derivative_permutations_unresolved(self, sig_xy):
        with pytest.raises(DeltaSingularUnresolvedError) as err:
            complete(system(sig_xy, "u_xy"), delta_strategy="permutation",
                     max_iterations=4)
        assert err.value.trace is not None

    def test_fixed_permutation_applied_up_front(self, sig_xyz):
        # wave written with t first still completes under a fixed relabeling
        sig = BundleSignature(["t", "x", "y"], ["u"])
        s = system(sig, "u_tt - u_xx - u_yy")
        result = complete(s, fixed_transform=[[0, 1, 0], [0, 0, 1], [1, 0, 0]])
        assert result.trace.steps[0].action == "coordinate-changed"
        assert is_involutive(result.system).involutive


class TestCompleteCascade:
    def test_two_stage_conditions(self, sig_xy):
        # u_xy = u and u_yy = 0 force u_y = 0 and then u = 0
        s = system(sig_xy, "u_xy - u", "u_yy")
        result = complete(s)
        assert is_involutive(result.system).involutive
        zero = PolynomialFunction.make(sig_xy, [DiffPolynomial.zero(sig_xy)])
        assert check_solution(result.system, zero)
        u = P(sig_xy, "u")
        assert u in set(result.system.equations)
        assert result.trace.iterations >= 2

    def test_max_iterations_guard(self, sig_xy):
        s = system(sig_xy, "u_xy - u", "u_yy")
        with pytest.raises(MaxIterationsExceededError) as err:
            complete(s, max_iterations=1)
        assert err.value.trace.iterations == 1


class TestTraceDiscipline:
    def test_projection_only_after_symbol_ok(self, sig_xyz):
        # replay: before each projected step the symbol test must have
        # passed, so no projected step may directly follow a prolonged one
        # that left the symbol non-involutive; for these inputs it suffices
        # that prolongations always precede projections per round
        result = complete(transport3d(sig_xyz))
        actions = [s.action for s in result.trace.steps]
        assert actions == ["projected"]

    def test_replay_determinism(self, sig_xyz):
        a = complete(transport3d(sig_xyz))
        b = complete(transport3d(sig_xyz))
        assert a.system == b.system
        assert [s.action for s in a.trace.steps] == [s.action for s in b.trace.steps]


class TestMinimizeOrder:
    def test_flag_keeps_involutive_presentation(self, sig_xyz):
        result = complete(transport3d(sig_xyz), minimize_order=True)
        assert is_involutive(result.system).involutive
        assert result.system.order <= 1


class TestFormallyIntegrable:
    def test_gradient_depth_three(self, sig_xyz):
        assert formally_integrable_up_to(gradient(sig_xyz), 3)

    def test_transport_fails_at_depth_zero(self, sig_xyz):
        assert not formally_integrable_up_to(transport3d(sig_xyz), 0)

    def test_single_ode_like_equation(self, sig_xy):
        assert formally_integrable_up_to(system(sig_xy, "u_x - u"), 2)

    def test_involutive_implies_integrable(self, sig_xyt):
        assert formally_integrable_up_to(wave2d(sig_xyt), 2)


class TestMembershipOfOutput:
    def test_output_in_differential_row_space(self, sig_xyz):
        from jets.linalg import in_row_space
        from jets.systems import echelon_of, to_affine_rows
        s = transport3d(sig_xyz)
        result = complete(s)
        depth = result.trace.max_order_seen - s.order
        ech = echelon_of(prolong(s, depth))
        for row in to_affine_rows(result.system):
            assert in_row_space(row.as_row(), ech)
