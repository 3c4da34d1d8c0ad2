"""Fast invariant checks shipped with the package (``weakthresh selftest``).

Each group returns a pass flag and a one-line summary.  The report text is
deterministic: no timings, fixed seeds, fixed grids.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import special
from .lp import LinearProgram, LpStatus, lp_solve
from .recovery import RecoveryProblem, SupportInfo, Verdict, certify_condition, recover, recovery_error
from .thresholds import (
    Mode,
    ThresholdError,
    alpha_threshold,
    beta_threshold,
    critical_alpha_informal,
)

__all__ = ["GroupResult", "GROUPS", "run_selftest", "vertex_enumeration"]


@dataclass(frozen=True)
class GroupResult:
    name: str
    passed: bool
    summary: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.summary}"


def _erfinv_roundtrip() -> tuple[bool, str]:
    tail = np.logspace(-10, 0, 500, endpoint=False)
    p = np.concatenate([-(1.0 - tail), np.linspace(-0.99, 0.99, 199), (1.0 - tail)[::-1]])
    err = max(abs(special.erf(special.erfinv(float(v))) - float(v)) for v in p)
    odd = all(special.erfinv(-float(v)) == -special.erfinv(float(v)) for v in p[::7])
    ok = err <= 1e-12 and odd
    return ok, f"max |erf(erfinv(p)) - p| = {err:.3e} over {p.size} points, odd={odd}"


def _eta_zero() -> tuple[bool, str]:
    alphas = np.round(np.arange(0.05, 0.951, 0.1), 10)
    diff = max(
        abs(beta_threshold(a, 0.0, Mode.PARTIAL).beta - beta_threshold(a, 0.0, Mode.STANDARD).beta)
        for a in alphas
    )
    return diff <= 1e-9, f"max |beta_partial(eta=0) - beta_standard| = {diff:.3e} over {alphas.size} alphas"


def _two_form() -> tuple[bool, str]:
    worst = 0.0
    count = 0
    for mode, etas in ((Mode.STANDARD, (0.0,)), (Mode.PARTIAL, (0.25, 0.75)), (Mode.HIDDEN, (0.25, 0.75))):
        for eta in etas:
            for beta in (0.05, 0.15, 0.25):
                try:
                    theorem = alpha_threshold(beta, eta, mode).alpha
                    informal, _ = critical_alpha_informal(beta, eta, mode)
                except ThresholdError:
                    continue
                worst = max(worst, abs(theorem - informal))
                count += 1
    return count > 0 and worst <= 1e-6, f"max |alpha_theorem - alpha_informal| = {worst:.3e} over {count} points"


def vertex_enumeration(c: np.ndarray, A: np.ndarray, b: np.ndarray) -> float:
    """Minimum of ``c @ x`` over basic feasible solutions; ``inf`` if none.

    Exact only for bounded problems (the caller ensures ``c >= 0``).
    """
    m, n = A.shape
    best = np.inf
    for basis in itertools.combinations(range(n), m):
        B = A[:, basis]
        if abs(np.linalg.det(B)) < 1e-12:
            continue
        xb = np.linalg.solve(B, b)
        if np.all(xb >= -1e-12):
            best = min(best, float(c[list(basis)] @ xb))
    return best


def _lp_oracle() -> tuple[bool, str]:
    rng = np.random.default_rng(20130101)
    worst, solved = 0.0, 0
    ok = True
    for _ in range(30):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, min(n, 4) + 1))
        A = rng.standard_normal((m, n))
        b = A @ rng.exponential(size=n)
        c = rng.exponential(size=n)
        exact = vertex_enumeration(c, A, b)
        sol = lp_solve(LinearProgram(c, A, b))
        if sol.status is not LpStatus.OPTIMAL:
            ok = False
            continue
        worst = max(worst, abs(sol.objective - exact))
        solved += 1
    ok = ok and worst <= 1e-8
    return ok, f"{solved}/30 optimal, max |objective - enumeration| = {worst:.3e}"


def _certificate() -> tuple[bool, str]:
    rng = np.random.default_rng(20130102)
    n, m = 20, 10
    checked = mismatched = indeterminate = 0
    for mode, eta in ((Mode.STANDARD, 0.0), (Mode.PARTIAL, 0.5), (Mode.HIDDEN, 0.75)):
        for _ in range(20):
            k = int(rng.integers(2, 7))
            A = rng.standard_normal((m, n))
            K = np.sort(rng.choice(n, size=k, replace=False))
            j = int(np.floor(eta * k + 0.5)) if mode is not Mode.STANDARD else 0
            if mode is Mode.PARTIAL:
                info = SupportInfo(mode, pi=rng.choice(K, size=j, replace=False))
            elif mode is Mode.HIDDEN:
                rest = np.setdiff1d(np.arange(n), K)
                info = SupportInfo(mode, kappa=np.concatenate(
                    [rng.choice(K, size=j, replace=False), rng.choice(rest, size=k - j, replace=False)]))
            else:
                info = SupportInfo()
            x = np.zeros(n)
            x[K] = rng.standard_normal(k)
            verdict = certify_condition(A, K, info, np.sign(x[K])).verdict
            if verdict is Verdict.INDETERMINATE:
                indeterminate += 1
                continue
            result = recover(RecoveryProblem(A, A @ x, info))
            success = result.optimal and recovery_error(result.x_hat, x) <= 1e-4
            checked += 1
            mismatched += success != (verdict is Verdict.HOLDS)
    rate = mismatched / checked if checked else 1.0
    return rate <= 0.02, (
        f"{mismatched}/{checked} verdict/recovery mismatches, {indeterminate} indeterminate"
    )


GROUPS: dict[str, Callable[[], tuple[bool, str]]] = {
    "erfinv": _erfinv_roundtrip,
    "eta0": _eta_zero,
    "two_form": _two_form,
    "lp_oracle": _lp_oracle,
    "certificate": _certificate,
}


def run_selftest(groups: list[str] | None = None) -> list[GroupResult]:
    results = []
    for name in groups or list(GROUPS):
        try:
            passed, summary = GROUPS[name]()
        except Exception as exc:  # a crash is a failed group, not a crashed report
            passed, summary = False, f"raised {type(exc).__name__}: {exc}"
        results.append(GroupResult(name, bool(passed), summary))
    return results
