"""Acceptance criteria, each at its stated tolerance.

Every test records a one-line outcome that is printed in the terminal
summary.  Criterion 4 is expected to fail: the computed curves cross in the
opposite direction (see ``TestHiddenCrossing``).
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from oracles import vertex_enumeration
from weakthresh import special
from weakthresh.lp import LinearProgram, lp_solve
from weakthresh.montecarlo import (
    InstanceSpec,
    PhaseMapSpec,
    empirical_transition,
    gen_instance,
    phase_map,
    phase_map_csv,
    run_trial,
)
from weakthresh.recovery import Verdict, certify_condition
from weakthresh.thresholds import (
    alpha_from_theta,
    beta_threshold,
    critical_alpha_informal,
    solve_theta,
)


def record(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}")
    return passed


@pytest.fixture(scope="module")
def partial_map():
    spec = PhaseMapSpec(n=200, alphas=(0.3, 0.5, 0.7), trials=100, eta=0.5, mode="partial", master_seed=2013)
    start = time.perf_counter()
    pmap = phase_map(spec)
    return spec, pmap, time.perf_counter() - start


class TestEtaZero:
    def test_criterion_1(self):
        alphas = np.round(np.arange(0.05, 0.951, 0.05), 10)
        diff = max(abs(beta_threshold(a, 0.0, "partial").beta - beta_threshold(a).beta) for a in alphas)
        assert record(1, diff <= 1e-9, f"max |beta_p(eta=0) - beta_w| = {diff:.2e} over {alphas.size} alphas (tol 1e-9)")


class TestTwoForm:
    def test_criterion_2(self):
        betas = np.linspace(0.02, 0.2, 10)
        etas = (0.0, 0.25, 0.5, 0.75, 1.0)
        worst = worst_theta = 0.0
        for mode in ("standard", "partial", "hidden"):
            for eta in etas:
                for beta in betas:
                    theta = solve_theta(beta, eta, mode)
                    alpha = alpha_from_theta(theta, beta, eta, mode)
                    root, _ = critical_alpha_informal(beta, eta, mode)
                    worst = max(worst, abs(alpha - root))
                    if mode == "hidden":
                        worst_theta = max(worst_theta, abs(theta - (alpha - (1 - eta) * beta)))
        ok = worst <= 1e-6 and worst_theta <= 1e-6
        assert record(2, ok, f"max form gap {worst:.2e}, hidden theta gap {worst_theta:.2e} (tol 1e-6)")


class TestMonotoneInEta:
    def test_criterion_3(self):
        etas = (0.0, 0.25, 0.5, 0.75, 1.0)
        worst = np.inf
        for mode in ("partial", "hidden"):
            for alpha in (0.3, 0.5, 0.7):
                b = [beta_threshold(alpha, eta, mode).beta for eta in etas]
                worst = min(worst, float(np.min(np.diff(b))))
        assert record(3, worst >= 0.0, f"smallest step in beta across eta = {worst:.3e} (must be >= 0)")


class TestHiddenCrossing:
    @pytest.mark.xfail(strict=True, reason="curves cross in the opposite direction; see decisions ledger")
    def test_criterion_4(self):
        alphas = np.round(np.arange(0.05, 0.951, 0.05), 10)
        diff = np.array([beta_threshold(a, 0.75, "hidden").beta - beta_threshold(a).beta for a in alphas])
        # need hidden < standard below some alpha* and hidden > standard above it
        ok = any(np.all(diff[:i] < 0) and np.all(diff[i:] > 0) for i in range(1, alphas.size))
        signs = "".join("+" if d > 0 else "-" for d in diff)
        record(4, ok, f"sign of hidden - standard on alpha=0.05..0.95: {signs} (expected -...+)")
        assert ok


class TestPartialReplication:
    def test_criterion_5(self, partial_map):
        _, pmap, elapsed = partial_map
        rows = empirical_transition(pmap)
        gaps = {a: b - beta_threshold(a, 0.5, "partial").beta for a, b in rows}
        ok = len(rows) == 3 and all(abs(g) <= 0.05 for g in gaps.values())
        detail = ", ".join(f"alpha={a:g}: {g:+.4f}" for a, g in gaps.items())
        assert record(5, ok, f"beta_cross - beta_w [{detail}] (tol 0.05), {elapsed:.0f}s")


class TestHiddenReplication:
    def test_criterion_6(self):
        spec = PhaseMapSpec(n=200, alphas=(0.3, 0.5), trials=100, eta=0.75, mode="hidden", master_seed=2013)
        start = time.perf_counter()
        pmap = phase_map(spec)
        elapsed = time.perf_counter() - start
        rows = empirical_transition(pmap)
        gaps = {a: b - beta_threshold(a, 0.75, "hidden").beta for a, b in rows}
        ok = len(rows) == 2 and all(abs(g) <= 0.06 for g in gaps.values())
        detail = ", ".join(f"alpha={a:g}: {g:+.4f}" for a, g in gaps.items())
        assert record(6, ok, f"beta_cross - beta_w [{detail}] (tol 0.06), {elapsed:.0f}s")


class TestCertificateEquivalence:
    def test_criterion_7(self):
        n, m = 40, 20
        mismatched = checked = indeterminate = holds = 0
        for mode, eta in (("partial", 0.5), ("hidden", 0.75)):
            center = round(beta_threshold(m / n, eta, mode).beta * n)
            for i in range(200):
                k = center - 3 + i % 7
                inst = gen_instance(InstanceSpec(n, m, k, eta, mode, seed=7_000_000 + i))
                K = list(inst.K)
                verdict = certify_condition(inst.A, K, inst.support_info, np.sign(inst.x_true[K])).verdict
                if verdict is Verdict.INDETERMINATE:
                    indeterminate += 1
                    continue
                checked += 1
                holds += verdict is Verdict.HOLDS
                mismatched += run_trial(inst) != (verdict is Verdict.HOLDS)
        rate = mismatched / checked
        assert 0 < holds < checked  # the k range straddles the verdict
        assert record(7, rate <= 0.02, f"{mismatched}/{checked} mismatches ({holds} holds), "
                                       f"{indeterminate} indeterminate (tol 2%)")


class TestLpOracle:
    def test_criterion_8(self):
        rng = np.random.default_rng(8)
        worst = worst_gap = 0.0
        optimal = 0
        for _ in range(100):
            N = int(rng.integers(2, 11))
            M = int(rng.integers(1, min(N - 1, 5) + 1))
            A = rng.standard_normal((M, N))
            b = A @ rng.exponential(size=N)
            c = rng.exponential(size=N)
            sol = lp_solve(LinearProgram(c, A, b))
            if sol.optimal:
                optimal += 1
                worst_gap = max(worst_gap, sol.duality_gap)
            worst = max(worst, abs(sol.objective - vertex_enumeration(c, A, b)))
        ok = optimal == 100 and worst <= 1e-8 and worst_gap <= 1e-8
        assert record(8, ok, f"{optimal}/100 optimal, max objective error {worst:.2e}, "
                             f"max duality gap {worst_gap:.2e} (tol 1e-8)")


class TestErfinv:
    def test_criterion_9(self):
        edge = 1.0 - 1e-10
        p = np.linspace(-edge, edge, 10_000)
        err = max(abs(special.erf(special.erfinv(float(v))) - float(v)) for v in p)
        assert record(9, err <= 1e-12, f"max |erf(erfinv(p)) - p| = {err:.2e} over {p.size} points (tol 1e-12)")


class TestDeterminism:
    def test_criterion_10(self, partial_map):
        spec, pmap, _ = partial_map
        first = phase_map_csv(pmap).encode()
        again = phase_map_csv(phase_map(spec, jobs=2)).encode()
        assert record(10, first == again, f"criterion 5 map rerun with jobs=2: "
                                          f"{'byte-identical' if first == again else 'differs'} ({len(first)} bytes)")
