"""Weighted l1 recovery programs and their null-space certificates.

Three programs share one LP encoding, differing only in the 0/1 weights:

* standard  -- minimize ``sum |x_i|``
* partial   -- minimize ``sum_{i not in pi} |x_i|``    (pi: known support)
* hidden    -- minimize ``sum_{i not in kappa} |x_i|`` (kappa: support estimate)

all subject to ``A x = y``.  Indices are 0-based throughout.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .lp import LinearProgram, LpSolution, LpStatus, lp_solve
from .thresholds import Mode

__all__ = [
    "SupportInfo",
    "RecoveryProblem",
    "RecoveryResult",
    "Verdict",
    "CertificateOutcome",
    "build_weights",
    "recover",
    "recovery_error",
    "certify_condition",
]

log = logging.getLogger(__name__)

CERTIFICATE_DELTA = 1e-6
WITNESS_RESIDUAL = 1e-8


def _index_tuple(values: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(int(v) for v in values))


@dataclass(frozen=True)
class SupportInfo:
    """Side information handed to the recovery program.

    ``pi`` is only meaningful in partial mode and ``kappa`` only in hidden
    mode; the other set must be empty.
    """

    mode: Mode = Mode.STANDARD
    pi: tuple[int, ...] = ()
    kappa: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        object.__setattr__(self, "pi", _index_tuple(self.pi))
        object.__setattr__(self, "kappa", _index_tuple(self.kappa))

    def validate(self, n: int) -> None:
        for name, idx in (("pi", self.pi), ("kappa", self.kappa)):
            if len(set(idx)) != len(idx):
                raise ValueError(f"{name} contains duplicate indices")
            if idx and (idx[0] < 0 or idx[-1] >= n):
                raise ValueError(f"{name} indices out of range for n={n}")
        if self.mode is Mode.STANDARD and (self.pi or self.kappa):
            raise ValueError("standard mode takes neither pi nor kappa")
        if self.mode is Mode.PARTIAL and self.kappa:
            raise ValueError("partial mode takes pi only; kappa must be empty")
        if self.mode is Mode.HIDDEN and self.pi:
            raise ValueError("hidden mode takes kappa only; pi is hidden inside it")

    @property
    def unweighted(self) -> tuple[int, ...]:
        """Indices that carry zero weight in the objective."""
        if self.mode is Mode.PARTIAL:
            return self.pi
        if self.mode is Mode.HIDDEN:
            return self.kappa
        return ()


@dataclass
class RecoveryProblem:
    A: np.ndarray
    y: np.ndarray
    support_info: SupportInfo = field(default_factory=SupportInfo)

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.y = np.asarray(self.y, dtype=float).ravel()
        m, n = self.A.shape
        if self.y.size != m:
            raise ValueError(f"y has length {self.y.size} but A has {m} rows")
        if m > n:
            raise ValueError(f"A is {m}x{n}; need m <= n")
        self.support_info.validate(n)


@dataclass
class RecoveryResult:
    x_hat: np.ndarray
    objective: float
    feasibility_residual: float
    lp_status: LpStatus
    lp: LpSolution | None = None

    @property
    def optimal(self) -> bool:
        return self.lp_status is LpStatus.OPTIMAL


def _rank_tol(s: np.ndarray, shape) -> float:
    return (float(s[0]) if s.size else 0.0) * max(shape) * np.finfo(float).eps


def build_weights(n: int, support_info: SupportInfo) -> np.ndarray:
    """0/1 objective weights: zero on the side-information set, one elsewhere."""
    support_info.validate(n)
    w = np.ones(n)
    w[list(support_info.unweighted)] = 0.0
    return w


def _range_complement(M: np.ndarray) -> np.ndarray:
    """Rows form an orthonormal basis of the orthogonal complement of range(M)."""
    U, s, _ = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > _rank_tol(s, M.shape)))
    return U[:, rank:].T


def _min_l1(A: np.ndarray, y: np.ndarray, opts: dict) -> tuple[np.ndarray | None, LpStatus, LpSolution | None]:
    """``min ||x||_1`` s.t. ``A x = y`` through the split LP."""
    rows, cols = A.shape
    consistent = float(np.max(np.abs(y), initial=0.0)) <= 1e-12
    if rows == 0 or cols == 0:
        if rows == 0 or consistent:
            return np.zeros(cols), LpStatus.OPTIMAL, None
        return None, LpStatus.INFEASIBLE, None
    if rows > 2 * cols:
        # more equations than split variables: keep an orthonormal row basis
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
        r = int(np.sum(s > _rank_tol(s, A.shape)))
        A, y = s[:r, None] * Vt[:r], U[:, :r].T @ y
    sol = lp_solve(LinearProgram(c=np.ones(2 * cols), A_eq=np.hstack([A, -A]), b_eq=y), **opts)
    if sol.status in (LpStatus.OPTIMAL, LpStatus.NUMERICAL_FAILURE):
        return sol.x[:cols] - sol.x[cols:], sol.status, sol
    return None, sol.status, sol


def recover(problem: RecoveryProblem, *, tol: float | None = None) -> RecoveryResult:
    """Solve the weighted l1 program for ``problem``.

    Encoded as ``min sum w_i (u_i + v_i)`` s.t. ``A (u - v) = y``, ``u, v >= 0``
    and returned as ``x_hat = u - v``.  Zero-weight coordinates are not split:
    a zero-cost pair lets ``u_i + v_i`` drift without bound inside the
    interior-point iteration.  They are projected out instead (``A_W x_W - y``
    must lie in the range of the unweighted columns), and recovered afterwards
    by least squares.  A non-optimal LP status is reported in the result,
    never raised.
    """
    A, y = problem.A, problem.y
    m, n = A.shape
    w = build_weights(n, problem.support_info)
    free = np.flatnonzero(w == 0)
    kept = np.flatnonzero(w > 0)
    opts = {} if tol is None else {"tol": tol}
    if free.size:
        P = _range_complement(A[:, free])
        x_kept, status, sol = _min_l1(P @ A[:, kept], P @ y, opts)
    else:
        x_kept, status, sol = _min_l1(A, y, opts)

    if x_kept is None:
        x_hat = np.full(n, np.nan)
        residual = np.inf
    else:
        x_hat = np.zeros(n)
        x_hat[kept] = x_kept
        if free.size:
            x_hat[free] = np.linalg.lstsq(A[:, free], y - A[:, kept] @ x_kept, rcond=None)[0]
        residual = float(np.linalg.norm(A @ x_hat - y))
    return RecoveryResult(
        x_hat=x_hat,
        objective=float(w @ np.abs(x_hat)),
        feasibility_residual=residual,
        lp_status=status,
        lp=sol,
    )


def recovery_error(x_hat: np.ndarray, x_true: np.ndarray) -> float:
    """``||x_hat - x_true||_2 / max(1, ||x_true||_2)``."""
    return float(np.linalg.norm(x_hat - x_true) / max(1.0, np.linalg.norm(x_true)))


# ---------------------------------------------------------------------------
# certificates


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INDETERMINATE = "indeterminate"


@dataclass
class CertificateOutcome:
    verdict: Verdict
    optimum: float
    witness: np.ndarray | None = None
    diagnostic: str = ""
    lp: LpSolution | None = None


def _certificate_sets(n: int, support: Sequence[int], info: SupportInfo):
    """Index sets of the null-space condition.

    ``gain`` holds the weighted support coordinates whose signed sum must
    stay below the l1 mass on ``cost``, the weighted off-support coordinates.
    Every other coordinate is unconstrained.
    """
    in_support = np.zeros(n, dtype=bool)
    in_support[list(support)] = True
    weighted = build_weights(n, info) > 0
    return np.flatnonzero(in_support & weighted), np.flatnonzero(~in_support & weighted)


def certify_condition(
    A: np.ndarray,
    true_support: Sequence[int],
    support_info: SupportInfo,
    signs: Sequence[float] | np.ndarray,
    *,
    delta: float = CERTIFICATE_DELTA,
) -> CertificateOutcome:
    """Decide the exact null-space condition for one support/sign pattern.

    The condition holds when every nonzero ``w`` with ``A w = 0`` satisfies
    ``sum_gain -s_i w_i < sum_cost |w_i|``, where ``s`` are the signs of the
    planted nonzeros.  After negating the columns with positive sign (which
    reduces every pattern to the all-nonpositive one) it is decided by

        maximize   sum_gain w_i
        subject to A w = 0,  sum_cost |w_i| <= 1,  w free elsewhere.

    Optimum ``<= 1 - delta`` -> holds; ``>= 1 + delta`` or unbounded -> fails
    with a witness; otherwise indeterminate.

    The unweighted coordinates (``gain`` and the free ones) are eliminated
    before the LP is built.  If the objective has a component along the null
    space of their columns the program is unbounded and that direction is
    the witness.  Otherwise the objective is a fixed linear function of the
    cost coordinates, and the LP runs over the l1 ball on those alone, where
    every variable is bounded.

    ``signs`` is aligned with the sorted ``true_support``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    support = _index_tuple(true_support)
    signs = np.asarray(signs, dtype=float).ravel()
    if signs.size != len(support):
        raise ValueError(f"{signs.size} signs for a support of size {len(support)}")
    if np.any(signs == 0) or not np.all(np.isfinite(signs)):
        raise ValueError("signs must be finite and nonzero")
    if len(set(support)) != len(support) or (support and (support[0] < 0 or support[-1] >= n)):
        raise ValueError(f"true support must be distinct indices in [0, {n})")
    support_info.validate(n)
    if support_info.mode is Mode.PARTIAL and not set(support_info.pi) <= set(support):
        raise ValueError("pi must be a subset of the true support")

    flip = np.ones(n)
    flip[list(support)] = -np.sign(signs)
    A_f = A * flip

    gain, cost = _certificate_sets(n, support, support_info)
    other = np.setdiff1d(np.arange(n), cost)
    e_gain = np.isin(other, gain).astype(float)
    A_o, A_c = A_f[:, other], A_f[:, cost]

    # null(A_o) and range(A_o) from one SVD
    U, s, Vt = np.linalg.svd(A_o, full_matrices=True)
    rank = int(np.sum(s > _rank_tol(s, A_o.shape)))
    null_o = Vt[rank:].T
    direction = null_o @ (null_o.T @ e_gain)
    if float(e_gain @ direction) > np.sqrt(np.finfo(float).eps) * max(1.0, np.sqrt(e_gain.sum())):
        w = np.zeros(n)
        w[other] = direction / np.max(np.abs(direction))
        return CertificateOutcome(
            Verdict.FAILS, np.inf, flip * w, "unbounded: objective direction in null space"
        )

    # sum_gain w = lam @ A_o w_o = -lam @ A_c w_c, and A_c w_c must lie in range(A_o)
    lam = np.linalg.lstsq(A_o.T, e_gain, rcond=None)[0] if other.size else np.zeros(m)
    g = -(A_c.T @ lam)
    B = U[:, rank:].T @ A_c
    nc = cost.size
    if B.size:
        # orthonormal full-row-rank version of the same constraint
        _, sb, Vbt = np.linalg.svd(B, full_matrices=False)
        B = Vbt[: int(np.sum(sb > max(_rank_tol(sb, B.shape), 1e-12)))]
    else:
        B = np.zeros((0, nc))
    r = B.shape[0]
    lp = LinearProgram(
        c=np.concatenate([-g, g, [0.0]]),
        A_eq=np.block([
            [B, -B, np.zeros((r, 1))],
            [np.ones((1, nc)), np.ones((1, nc)), np.ones((1, 1))],
        ]),
        b_eq=np.concatenate([np.zeros(r), [1.0]]),
    )
    sol = lp_solve(lp)
    if sol.status is not LpStatus.OPTIMAL:
        log.warning("certificate LP ended with status %s", sol.status.value)
        return CertificateOutcome(
            Verdict.INDETERMINATE, np.nan, None, f"LP status {sol.status.value}", sol
        )
    optimum = -sol.objective
    if optimum <= 1.0 - delta:
        return CertificateOutcome(Verdict.HOLDS, optimum, None, "", sol)
    if optimum >= 1.0 + delta:
        w = np.zeros(n)
        w[cost] = sol.x[:nc] - sol.x[nc : 2 * nc]
        if other.size:
            w[other] = np.linalg.lstsq(A_o, -(A_c @ w[cost]), rcond=None)[0]
        return CertificateOutcome(Verdict.FAILS, optimum, flip * w, "", sol)
    return CertificateOutcome(
        Verdict.INDETERMINATE, optimum, None, "optimum within delta of 1", sol
    )
