import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecomech import (
    EcoProfile,
    IncentiveVector,
    SolverOptions,
    ValidationError,
    best_response,
    epsilon_nash_check,
    incentivized_cost,
    nash_solve,
)
from ecomech.scenarios import GenerationSpec, generate
from conftest import game_instances, profile, types


def ell(sc, i, a, th, u):
    return incentivized_cost(sc, i, a, th, u)


class TestBestResponse:
    def test_s1_interior_points(self, s1):
        others = profile(0.0)
        assert best_response(s1, 0, others, 0.2, 0.0) == pytest.approx(
            0.0695862684160760, abs=1e-6
        )
        assert best_response(s1, 0, others, 0.2, 1.0) == pytest.approx(
            0.3137818588875160, abs=1e-6
        )

    def test_s1_corner(self, s1):
        assert best_response(s1, 0, profile(0.0), 0.2, 10.0) == 1.0

    def test_slot_i_ignored(self, s2):
        a = best_response(s2, 0, profile(0.0, 0.3), 0.2, 0.5)
        b = best_response(s2, 0, profile(1.0, 0.3), 0.2, 0.5)
        assert a == b

    def test_flat_objective_returns_largest_minimizer(self):
        # theta=0 and beta=0 make the cost constant; the eco-favoring
        # tie-break picks the top of the interval.
        from ecomech import DriverParams, Scenario

        sc = Scenario([[1.0]], [DriverParams(alpha=0.5, beta=0.0, gamma=1.0, xbar=2.0, ybar=1.0)])
        assert best_response(sc, 0, profile(0.0), 0.0, 0.0) == 1.0

    @given(game_instances(), st.floats(0.0, 1.0), st.floats(0.0, 6.0))
    @settings(max_examples=40, deadline=None)
    def test_beats_dense_grid(self, inst, theta_i, u_i):
        sc, levels, _ = inst
        br = best_response(sc, 0, EcoProfile(levels), theta_i, u_i)
        grid = np.linspace(0.0, 1.0, 1001)
        base = levels.copy()
        base[0] = br
        best = ell(sc, 0, EcoProfile(base), theta_i, u_i)
        for t in grid:
            base[0] = t
            assert best <= ell(sc, 0, EcoProfile(base), theta_i, u_i) + 1e-8

    @given(game_instances(), st.floats(0.0, 1.0), st.floats(0.0, 3.0), st.floats(0.0, 3.0))
    @settings(max_examples=40, deadline=None)
    def test_monotone_in_incentive(self, inst, theta_i, u_lo, u_hi):
        sc, levels, _ = inst
        lo, hi = sorted((u_lo, u_hi))
        a_lo = best_response(sc, 0, EcoProfile(levels), theta_i, lo)
        a_hi = best_response(sc, 0, EcoProfile(levels), theta_i, hi)
        assert a_hi >= a_lo - 1e-9


class TestNashSolve:
    def test_s2_reaches_corner(self, s2):
        res = nash_solve(s2, types(0.2, 0.2), IncentiveVector.zeros(2), profile(0.0, 0.0))
        assert res.converged
        assert np.allclose(res.profile.a, 1.0)
        assert res.residual <= 1e-6

    def test_single_driver_fixed_point(self, s1):
        res = nash_solve(s1, types(0.2), IncentiveVector.zeros(1), profile(1.0))
        assert res.converged
        assert res.profile.a[0] == pytest.approx(0.0695862684160760, abs=1e-6)

    def test_huge_incentive_one_sweep(self):
        for seed in range(5):
            sc, th = generate(GenerationSpec(n=4, seed=seed))
            u = IncentiveVector(np.full(4, 100.0))
            res = nash_solve(sc, th, u, EcoProfile(np.zeros(4)))
            assert np.all(res.profile.a == 1.0)
            assert res.iterations <= 2

    def test_non_convergence_returns_data(self, s2):
        opts = SolverOptions(max_sweeps=1)
        res = nash_solve(s2, types(0.2, 0.2), IncentiveVector.zeros(2), profile(0.0, 0.0), opts)
        assert not res.converged
        assert res.residual > opts.tol_profile

    def test_dimension_mismatch(self, s2):
        with pytest.raises(ValidationError):
            nash_solve(s2, types(0.2), IncentiveVector.zeros(2), profile(0.0, 0.0))

    def test_converged_profiles_are_best_responses(self):
        opts = SolverOptions(tol_profile=1e-8)
        rng = np.random.default_rng(3)
        for seed in range(8):
            sc, th = generate(GenerationSpec(n=4, seed=seed, theta_range=(0.0, 1.0)))
            u = IncentiveVector(rng.uniform(0.0, 4.0, 4))
            res = nash_solve(sc, th, u, EcoProfile(rng.uniform(0, 1, 4)), opts)
            assert res.converged
            for i in range(4):
                br = best_response(sc, i, res.profile, th.theta[i], u.u[i], opts)
                assert br == pytest.approx(res.profile.a[i], abs=1e-7)


class TestEpsilonNash:
    def test_corner_equilibrium_clean(self, s2):
        eps = epsilon_nash_check(s2, types(0.2, 0.2), IncentiveVector.zeros(2), profile(1.0, 1.0))
        assert np.all(eps <= 1e-12)

    def test_suboptimal_point_flagged(self, s1):
        eps = epsilon_nash_check(s1, types(0.2), IncentiveVector.zeros(1), profile(0.0))
        # grid oracle over the same 101-point axis
        grid = np.linspace(0.0, 1.0, 101)
        vals = [ell(s1, 0, profile(t), 0.2, 0.0) for t in grid]
        expected = ell(s1, 0, profile(0.0), 0.2, 0.0) - min(vals)
        assert expected > 0.009
        assert eps[0] == pytest.approx(expected, rel=1e-12)

    def test_solver_output_is_epsilon_nash(self):
        for seed in range(5):
            sc, th = generate(GenerationSpec(n=3, seed=seed))
            u = IncentiveVector(np.full(3, 0.7))
            res = nash_solve(sc, th, u, EcoProfile(np.zeros(3)))
            assert res.converged
            eps = epsilon_nash_check(sc, th, u, res.profile)
            assert np.all(eps <= 1e-4)
