"""Tests for the attractor bounds and stability conditions."""

import math

import numpy as np
import pytest

from conftest import random_admissible
from htpde import (KineticParams, check_b_condition, check_global_stability,
                   check_ratio_condition, homogeneous_steady, lipschitz_K,
                   monotone_iteration, quadruple_closed_r0, quadruple_residuals,
                   solve_quadruple)
from htpde.bounds import default_eps1, h_eval, h_prime
from htpde.errors import ConvergenceError, HypothesisError, ValidationError

U_SS_ORACLE = 0.78077640640441513  # positive root of r u^2 + (b+1-ar) u = a at a=1, b=0.5, r=1


class TestBCondition:
    def test_holds_with_margin(self):
        ok, margin = check_b_condition(1.0, 2.0, KineticParams(b=0.4, r=0.0, mu=1.0))
        assert ok and abs(margin - 0.1) < 1e-15

    def test_boundary_case_fails(self):
        ok, margin = check_b_condition(1.0, 2.0, KineticParams(b=0.5, r=0.0, mu=1.0))
        assert not ok and margin == 0.0

    def test_homogeneous_needs_only_b_below_one(self):
        ok, _ = check_b_condition(1.0, 1.0, KineticParams(b=0.99, r=0.0, mu=1.0))
        assert ok

    def test_extremes_out_of_order_rejected(self):
        with pytest.raises(ValidationError):
            check_b_condition(2.0, 1.0, KineticParams(b=0.1, r=0.0, mu=1.0))


class TestClosedFormR0:
    def test_reference_values(self):
        q = quadruple_closed_r0(1.0, 1.5, 0.5)
        assert abs(q.u_lo - 1.0 / 3.0) < 1e-15
        assert abs(q.u_hi - 4.0 / 3.0) < 1e-15
        assert q.v_lo == q.u_lo and q.v_hi == q.u_hi

    def test_homogeneous_degenerates_to_steady_state(self):
        q = quadruple_closed_r0(1.0, 1.0, 0.5)
        u = homogeneous_steady(1.0, KineticParams(b=0.5, r=0.0, mu=1.0))
        assert abs(q.u_lo - u) < 1e-15 and abs(q.u_hi - u) < 1e-15

    def test_small_amplitude_ratio(self):
        q = quadruple_closed_r0(1.0, 1.1, 0.05)
        assert abs(q.u_lo - 0.945 / 0.9975) < 1e-15
        assert abs(q.u_hi - 1.05 / 0.9975) < 1e-15
        assert abs(q.u_lo / q.u_hi - 0.9) < 1e-15

    def test_hypothesis_violation_rejected(self):
        with pytest.raises(HypothesisError):
            quadruple_closed_r0(1.0, 2.0, 0.5)

    def test_defining_identities(self):
        rng = np.random.default_rng(15)
        for _ in range(25):
            a_min, a_max, params = random_admissible(rng, r=0.0)
            q = quadruple_closed_r0(a_min, a_max, params.b)
            assert abs((a_max - q.u_hi) - params.b * q.u_lo) < 1e-12
            assert abs((a_min - q.u_lo) - params.b * q.u_hi) < 1e-12


class TestHEval:
    def test_endpoint_values(self):
        p = KineticParams(b=0.5, r=1.0, mu=1.0)
        assert abs(h_eval(0.0, 1.0, 1.0, p) - (-0.75)) < 1e-15
        assert abs(h_eval(1.0, 1.0, 1.0, p) - 0.125) < 1e-15

    def test_root_is_homogeneous_steady_state(self):
        p = KineticParams(b=0.5, r=1.0, mu=1.0)
        assert abs(h_eval(U_SS_ORACLE, 1.0, 1.0, p)) < 1e-14

    def test_matches_expanded_quartic_form(self):
        # h(tau) = (b a_max - P)(b + r P) - b^3 tau with P = (a_min-tau)(1+r tau)
        # expands to b^2 a_max + (b a_max r - b) P - r P^2 - b^3 tau.
        rng = np.random.default_rng(21)
        for _ in range(30):
            a_min, a_max, p = random_admissible(rng)
            tau = rng.uniform(0.0, a_min)
            P = (a_min - tau) * (1.0 + p.r * tau)
            expanded = (p.b ** 2 * a_max + (p.b * a_max * p.r - p.b) * P
                        - p.r * P ** 2 - p.b ** 3 * tau)
            assert abs(h_eval(tau, a_min, a_max, p) - expanded) < 1e-12

    def test_prime_matches_finite_difference(self):
        p = KineticParams(b=0.3, r=0.7, mu=1.0)
        tau, step = 0.4, 1e-6
        fd = (h_eval(tau + step, 1.0, 1.3, p) - h_eval(tau - step, 1.0, 1.3, p)) / (2 * step)
        assert abs(h_prime(tau, 1.0, 1.3, p) - fd) < 1e-7

    def test_bracketing_signs_under_hypothesis(self):
        rng = np.random.default_rng(33)
        for _ in range(25):
            a_min, a_max, p = random_admissible(rng)
            assert h_eval(0.0, a_min, a_max, p) < 0.0
            assert h_eval(a_min, a_min, a_max, p) > 0.0


class TestSolveQuadruple:
    def test_homogeneous_radical_case(self):
        q = solve_quadruple(1.0, 1.0, KineticParams(b=0.5, r=1.0, mu=1.0))
        for x in q.as_tuple():
            assert abs(x - 0.7807764) < 1e-7

    def test_saturated_heterogeneous_case(self):
        q = solve_quadruple(1.0, 1.2, KineticParams(b=0.3, r=0.5, mu=1.0))
        assert abs(q.u_lo - 0.7733) < 1e-3
        assert abs(q.u_hi - 1.0478) < 1e-3

    def test_r_zero_delegates_to_closed_form(self):
        q = solve_quadruple(1.0, 1.5, KineticParams(b=0.5, r=0.0, mu=1.0))
        qc = quadruple_closed_r0(1.0, 1.5, 0.5)
        assert q.as_tuple() == qc.as_tuple()

    def test_defining_identities_for_random_sets(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            a_min, a_max, p = random_admissible(rng)
            q = solve_quadruple(a_min, a_max, p)
            lhs_hi = (a_max - q.u_hi) * (1.0 + p.r * q.u_hi)
            lhs_lo = (a_min - q.u_lo) * (1.0 + p.r * q.u_lo)
            assert abs(lhs_hi - p.b * q.u_lo) < 1e-8
            assert abs(lhs_lo - p.b * q.u_hi) < 1e-8
            assert q.v_hi == q.u_hi and q.v_lo == q.u_lo

    def test_residuals_vanish_at_quadruple(self):
        p = KineticParams(b=0.3, r=0.5, mu=1.7)
        q = solve_quadruple(1.0, 1.2, p)
        for res in quadruple_residuals(q, 1.0, 1.2, p):
            assert abs(res) < 1e-11

    def test_hypothesis_violation_rejected(self):
        with pytest.raises(HypothesisError):
            solve_quadruple(1.0, 2.0, KineticParams(b=0.6, r=1.0, mu=1.0))

    def test_unique_sign_change_spot_check(self):
        rng = np.random.default_rng(55)
        for _ in range(10):
            a_min, a_max, p = random_admissible(rng)
            tau = np.linspace(0.0, a_min, 10_000)
            vals = h_eval(tau, a_min, a_max, p)
            changes = int(np.sum(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0))
            assert changes == 1


class TestLipschitzK:
    def test_corner_evaluation_example(self):
        # Box [0.5, 1.5]^2, a in [1, 1.5], b = 0.5, r = 0, mu = 1:
        # dominated by mu vhi^2 / ulo^2 = 9.
        p = KineticParams(b=0.5, r=0.0, mu=1.0)
        assert abs(lipschitz_K(0.5, 1.5, 0.5, 1.5, 1.0, 1.5, p) - 9.0) < 1e-15

    def test_scales_linearly_in_mu(self):
        p10 = KineticParams(b=0.5, r=0.0, mu=10.0)
        assert abs(lipschitz_K(0.5, 1.5, 0.5, 1.5, 1.0, 1.5, p10) - 90.0) < 1e-12

    def test_degenerate_box_at_least_mu(self):
        p = KineticParams(b=0.1, r=0.0, mu=2.0)
        assert lipschitz_K(0.7, 0.7, 0.7, 0.7, 1.0, 1.0, p) >= p.mu

    def test_out_of_order_box_rejected(self):
        p = KineticParams(b=0.5, r=0.0, mu=1.0)
        with pytest.raises(ValidationError):
            lipschitz_K(1.5, 0.5, 0.5, 1.5, 1.0, 1.5, p)


class TestDefaultEps1:
    def test_largest_admissible_candidate_selected(self):
        eps = default_eps1(1.0, 1.1, 0.05)
        assert eps == 0.01
        assert 0.05 * (1.1 + eps) < 1.0 - eps
        # A predation strength near the threshold forces a smaller seed.
        assert default_eps1(1.0, 1.0, 0.999) == 1e-4

    def test_no_admissible_seed_raises(self):
        b = 1.0 - 1e-16
        with pytest.raises(HypothesisError):
            default_eps1(1.0, 1.0, b)


class TestMonotoneIteration:
    def test_homogeneous_limit_matches_steady_state(self):
        p = KineticParams(b=0.5, r=1.0, mu=1.0)
        q, trace = monotone_iteration(1.0, 1.0, p, eps1=0.01, eps2=0.01, tol=1e-10)
        assert trace.converged
        for x in q.as_tuple():
            assert abs(x - U_SS_ORACLE) < 1e-8

    def test_r_zero_limit_matches_closed_form(self):
        p = KineticParams(b=0.5, r=0.0, mu=1.0)
        q, _ = monotone_iteration(1.0, 1.5, p, tol=1e-10)
        qc = quadruple_closed_r0(1.0, 1.5, 0.5)
        for x, y in zip(q.as_tuple(), qc.as_tuple()):
            assert abs(x - y) < 1e-8

    def test_first_step_ordering(self):
        p = KineticParams(b=0.5, r=1.0, mu=1.0)
        _, trace = monotone_iteration(1.0, 1.0, p, tol=1e-8)
        it = trace.iterates
        assert it.shape[0] >= 2
        # Seed row first; the chain directions hold between consecutive rows.
        assert it[1, 0] <= it[0, 0] and it[1, 1] >= it[0, 1]

    def test_ordering_chain_at_every_recorded_iterate(self):
        rng = np.random.default_rng(77)
        for _ in range(5):
            a_min, a_max, p = random_admissible(rng)
            _, trace = monotone_iteration(a_min, a_max, p, tol=1e-9)
            it = trace.iterates
            assert np.all(np.diff(it[:, 0]) <= 0.0)  # u_hi nonincreasing
            assert np.all(np.diff(it[:, 1]) >= 0.0)  # u_lo nondecreasing
            assert np.all(np.diff(it[:, 2]) <= 0.0)  # v_hi nonincreasing
            assert np.all(np.diff(it[:, 3]) >= 0.0)  # v_lo nondecreasing
            assert np.all(it[:, 1] <= it[:, 0]) and np.all(it[:, 3] <= it[:, 2])
            assert np.all(it[:, 1] > 0.0) and np.all(it[:, 3] > 0.0)

    def test_agrees_with_root_solve(self):
        rng = np.random.default_rng(13)
        for _ in range(5):
            a_min, a_max, p = random_admissible(rng)
            tol = 1e-10
            q_it, _ = monotone_iteration(a_min, a_max, p, tol=tol)
            q = solve_quadruple(a_min, a_max, p)
            for x, y in zip(q_it.as_tuple(), q.as_tuple()):
                assert abs(x - y) < 100.0 * tol

    def test_limit_independent_of_seeds(self):
        # The damping constant grows like (v_hi/u_lo)^2, so a much smaller
        # eps2 would push the iteration count beyond the budget; these seeds
        # differ from the defaults while keeping K moderate.
        p = KineticParams(b=0.3, r=0.5, mu=1.0)
        tol = 1e-10
        q1, _ = monotone_iteration(1.0, 1.2, p, tol=tol)
        q2, _ = monotone_iteration(1.0, 1.2, p, eps1=5e-3, eps2=4e-3, tol=tol)
        for x, y in zip(q1.as_tuple(), q2.as_tuple()):
            assert abs(x - y) < 100.0 * tol

    def test_bad_seed_order_rejected(self):
        p = KineticParams(b=0.3, r=0.5, mu=1.0)
        with pytest.raises(ValidationError):
            monotone_iteration(1.0, 1.2, p, eps1=1e-4, eps2=1e-3)

    def test_oversized_seed_rejected(self):
        p = KineticParams(b=0.9, r=0.5, mu=1.0)
        with pytest.raises(ValidationError):
            monotone_iteration(1.0, 1.05, p, eps1=0.1, eps2=0.1)

    def test_iteration_budget_exhaustion_carries_partial(self):
        p = KineticParams(b=0.5, r=1.0, mu=1.0)
        with pytest.raises(ConvergenceError) as exc:
            monotone_iteration(1.0, 1.0, p, tol=1e-12, max_iter=10)
        trace = exc.value.partial
        assert trace is not None and not trace.converged
        assert trace.n_iter == 10

    def test_hypothesis_violation_rejected(self):
        p = KineticParams(b=0.95, r=0.0, mu=1.0)
        with pytest.raises(HypothesisError):
            monotone_iteration(1.0, 1.1, p)


class TestStabilityConditions:
    D_UNIT = ((1.0, 1.0), (1.0, 1.0))

    def test_small_amplitude_case_margin(self):
        p = KineticParams(b=0.05, r=0.0, mu=1.0)
        q = quadruple_closed_r0(1.0, 1.1, 0.05)
        ok, margin = check_global_stability(q, self.D_UNIT, p, 1.0)
        assert ok
        assert abs(margin - 0.7184334714209162) < 1e-12
        assert abs((margin + p.b) - 0.9 ** 2.5) < 1e-15

    def test_wide_amplitude_case_fails(self):
        p = KineticParams(b=0.5, r=0.0, mu=1.0)
        q = quadruple_closed_r0(1.0, 1.5, 0.5)
        ok, margin = check_global_stability(q, self.D_UNIT, p, 1.0)
        assert not ok
        assert abs((margin + p.b) - 0.03125) < 1e-15

    def test_homogeneous_reduces_to_b_below_one(self):
        p = KineticParams(b=0.73, r=0.0, mu=1.0)
        q = quadruple_closed_r0(1.0, 1.0, 0.73)
        ok, margin = check_global_stability(q, self.D_UNIT, p, 1.0)
        assert ok and abs(margin - (1.0 - 0.73)) < 1e-12

    def test_diffusion_contrast_shrinks_margin(self):
        p = KineticParams(b=0.05, r=0.0, mu=1.0)
        q = quadruple_closed_r0(1.0, 1.1, 0.05)
        d_contrast = ((0.5, 2.0), (1.0, 1.0))
        _, margin_flat = check_global_stability(q, self.D_UNIT, p, 1.0)
        _, margin_contrast = check_global_stability(q, d_contrast, p, 1.0)
        assert margin_contrast < margin_flat
        assert abs((margin_contrast + p.b) - 0.5 * (margin_flat + p.b)) < 1e-15

    def test_ratio_condition_values(self):
        p = KineticParams(b=0.5, r=0.0, mu=1.0)
        ok, margin = check_ratio_condition(1.1, self.D_UNIT, p, 1.0)
        assert ok and abs((margin + p.b) - 1.1 ** -2.5) < 1e-15
        ok4, margin4 = check_ratio_condition(4.0, self.D_UNIT, p, 1.0)
        assert not ok4 and abs((margin4 + p.b) - 0.03125) < 1e-15

    def test_ratio_condition_at_unit_contrast(self):
        p = KineticParams(b=0.2, r=0.7, mu=1.0)
        d = ((0.9, 1.0), (1.0, 1.0))
        ok, margin = check_ratio_condition(1.0, d, p, 1.0)
        expect = (1.0 + 0.7) * math.sqrt(0.9) - 0.2
        assert ok and abs(margin - expect) < 1e-14

    def test_ratio_below_one_rejected(self):
        p = KineticParams(b=0.5, r=0.0, mu=1.0)
        with pytest.raises(ValidationError):
            check_ratio_condition(0.9, self.D_UNIT, p, 1.0)

    def test_disordered_extremes_rejected(self):
        p = KineticParams(b=0.5, r=0.0, mu=1.0)
        q = quadruple_closed_r0(1.0, 1.1, 0.5)
        with pytest.raises(ValidationError):
            check_global_stability(q, ((2.0, 1.0), (1.0, 1.0)), p, 1.0)
