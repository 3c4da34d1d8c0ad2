"""Interior-point LP solver against vertex enumeration and HiGHS."""

import numpy as np
import pytest
from scipy.optimize import linprog

from weakthresh.lp import LinearProgram, LpStatus, lp_solve

import oracles


def _random_bounded(rng, max_n=10, max_m=5):
    n = int(rng.integers(1, max_n + 1))
    m = int(rng.integers(1, min(n, max_m) + 1))
    A = rng.standard_normal((m, n))
    b = A @ (rng.exponential(size=n) * (rng.random(n) < 0.7))
    c = rng.exponential(size=n)
    return c, A, b


class TestSmallCases:
    def test_one_variable(self):
        sol = lp_solve(LinearProgram([1.0], [[1.0]], [1.0]))
        assert sol.status is LpStatus.OPTIMAL
        np.testing.assert_allclose(sol.x, [1.0], atol=1e-9)
        np.testing.assert_allclose(sol.objective, 1.0, atol=1e-9)

    def test_nonnegativity_conflict(self):
        sol = lp_solve(LinearProgram([0.0, 0.0], [[1.0, 1.0]], [-1.0]))
        assert sol.status is LpStatus.INFEASIBLE
        # Farkas ray: A^T y <= 0, b y > 0
        assert np.all(np.array([[1.0, 1.0]]).T @ sol.y <= 1e-9) and -1.0 * sol.y[0] > 0

    def test_unbounded(self):
        sol = lp_solve(LinearProgram([-1.0, 0.0], [[1.0, -1.0]], [0.0]))
        assert sol.status is LpStatus.UNBOUNDED
        assert sol.x @ [-1.0, 0.0] < 0 and abs(sol.x[0] - sol.x[1]) <= 1e-9

    def test_random_3x6_against_enumeration(self):
        rng = np.random.default_rng(36)
        A = rng.standard_normal((3, 6))
        b = A @ rng.exponential(size=6)
        c = rng.exponential(size=6)
        sol = lp_solve(LinearProgram(c, A, b))
        assert abs(sol.objective - oracles.vertex_enumeration(c, A, b)) <= 1e-8

    @pytest.mark.parametrize("bad", [
        dict(c=[1.0, 2.0], A_eq=[[1.0]], b_eq=[1.0]),
        dict(c=[1.0], A_eq=[[1.0], [2.0]], b_eq=[1.0, 2.0]),
        dict(c=[1.0], A_eq=[[np.nan]], b_eq=[1.0]),
        dict(c=[1.0], A_eq=[[1.0]], b_eq=[1.0, 2.0]),
    ])
    def test_invalid_programs(self, bad):
        with pytest.raises(ValueError):
            LinearProgram(**bad)


class TestOracleEquivalence:
    def test_hundred_seeded_instances(self):
        rng = np.random.default_rng(2013)
        for _ in range(100):
            c, A, b = _random_bounded(rng)
            sol = lp_solve(LinearProgram(c, A, b))
            assert sol.status is LpStatus.OPTIMAL
            assert abs(sol.objective - oracles.vertex_enumeration(c, A, b)) <= 1e-8
            assert sol.duality_gap <= 1e-8 * (1 + abs(sol.objective))
            assert sol.primal_residual <= 1e-8 * (1 + np.abs(b).max())
            # weak duality, within the tolerance scaling
            assert sol.dual_objective <= sol.objective + 1e-8 * (1 + abs(sol.objective))

    def test_status_classification_against_highs(self):
        rng = np.random.default_rng(5)
        for t in range(300):
            n = int(rng.integers(1, 9))
            m = int(rng.integers(1, min(n, 4) + 1))
            A = rng.standard_normal((m, n))
            c = rng.standard_normal(n)
            b = rng.standard_normal(m) if t % 2 else A @ rng.exponential(size=n)
            ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
            sol = lp_solve(LinearProgram(c, A, b))
            if ref.status == 0:
                assert sol.status is LpStatus.OPTIMAL
                assert abs(sol.objective - ref.fun) <= 1e-8 * (1 + abs(ref.fun))
            elif ref.status == 2:
                assert sol.status is LpStatus.INFEASIBLE
            elif ref.status == 3:
                assert sol.status is LpStatus.UNBOUNDED

    def test_recovery_sized_against_highs(self):
        rng = np.random.default_rng(11)
        n, m = 120, 50
        A = rng.standard_normal((m, n))
        x = np.zeros(n)
        x[rng.choice(n, 20, replace=False)] = rng.standard_normal(20)
        c = np.ones(2 * n)
        Aeq = np.hstack([A, -A])
        ref = linprog(c, A_eq=Aeq, b_eq=A @ x, bounds=(0, None), method="highs")
        sol = lp_solve(LinearProgram(c, Aeq, A @ x))
        assert sol.status is LpStatus.OPTIMAL
        assert abs(sol.objective - ref.fun) <= 1e-8 * (1 + ref.fun)


class TestBehaviour:
    def test_deterministic(self):
        rng = np.random.default_rng(1)
        c, A, b = _random_bounded(rng)
        s1 = lp_solve(LinearProgram(c, A, b))
        s2 = lp_solve(LinearProgram(c, A, b))
        np.testing.assert_array_equal(s1.x, s2.x)
        assert s1.iterations == s2.iterations

    def test_zero_cost_coordinates(self):
        # an optimal face with free drift along a zero-cost pair
        A = np.array([[1.0, 1.0, -1.0]])
        sol = lp_solve(LinearProgram([1.0, 0.0, 0.0], A, [1.0]))
        assert sol.status is LpStatus.OPTIMAL
        assert abs(sol.objective) <= 1e-8

    def test_iteration_cap_reports_failure(self):
        rng = np.random.default_rng(3)
        c, A, b = _random_bounded(rng)
        sol = lp_solve(LinearProgram(c, A, b), max_iter=1)
        assert sol.status is LpStatus.NUMERICAL_FAILURE
