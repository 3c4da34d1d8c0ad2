"""Dense primal-dual interior-point solver for standard-form LPs.

Solves

    minimize    c @ x
    subject to  A @ x = b,  x >= 0

with Mehrotra's predictor-corrector applied to the homogeneous self-dual
embedding, which yields either an optimal pair or a Farkas-type certificate
of primal infeasibility / unboundedness without a phase-one problem.  Newton
systems are reduced to the normal equations ``A D A^T`` and factored densely
by Cholesky, with a least-squares fallback when the factorization breaks
down near the boundary.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

__all__ = ["LinearProgram", "LpSolution", "LpStatus", "lp_solve"]

log = logging.getLogger(__name__)


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass
class LinearProgram:
    c: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        self.A_eq = np.atleast_2d(np.asarray(self.A_eq, dtype=float))
        self.b_eq = np.asarray(self.b_eq, dtype=float).ravel()
        m, n = self.A_eq.shape
        if n < 1 or self.c.size != n:
            raise ValueError(f"cost vector has length {self.c.size}, A_eq has {n} columns")
        if self.b_eq.size != m:
            raise ValueError(f"b_eq has length {self.b_eq.size}, A_eq has {m} rows")
        if m > n:
            raise ValueError(f"more constraints ({m}) than variables ({n})")
        if not (np.all(np.isfinite(self.A_eq)) and np.all(np.isfinite(self.b_eq)) and np.all(np.isfinite(self.c))):
            raise ValueError("LP data must be finite")


@dataclass
class LpSolution:
    """Solver outcome.

    For ``OPTIMAL`` the primal ``x``, dual ``y`` and reduced costs ``z`` are
    the unscaled iterates.  For ``INFEASIBLE`` ``y`` is a normalized Farkas
    ray (``A^T y <= 0``, ``b @ y > 0``); for ``UNBOUNDED`` ``x`` is a
    normalized primal ray (``A x = 0``, ``x >= 0``, ``c @ x < 0``).
    """

    x: np.ndarray
    objective: float
    status: LpStatus
    duality_gap: float
    primal_residual: float
    iterations: int
    y: np.ndarray | None = None
    z: np.ndarray | None = None
    dual_objective: float = float("nan")
    dual_residual: float = float("nan")

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _factor(M: np.ndarray, reg: float, refine: int = 2):
    """Solver for ``M p = r`` from a regularized factorization of ``M``.

    A few steps of iterative refinement against the unregularized ``M``
    remove the bias the regularization introduces; near a degenerate optimum
    that bias otherwise shows up as a primal residual that stops shrinking.
    """
    Mr = M.copy()
    Mr.flat[:: M.shape[0] + 1] += reg
    try:
        cf = sla.cho_factor(Mr, lower=True, check_finite=False)
        if not np.all(np.isfinite(cf[0])):
            raise np.linalg.LinAlgError
        base = lambda r: sla.cho_solve(cf, r, check_finite=False)
    except (np.linalg.LinAlgError, ValueError):
        base = lambda r: sla.lstsq(Mr, r, check_finite=False, lapack_driver="gelsy")[0]

    def solve(r):
        p = base(r)
        for _ in range(refine):
            p = p + base(r - M @ p)
        return p

    return solve


def _max_step(v: np.ndarray, dv: np.ndarray) -> float:
    neg = dv < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-v[neg] / dv[neg]))


def lp_solve(
    lp: LinearProgram,
    *,
    tol: float = 1e-10,
    max_iter: int = 200,
    regularization: float = 1e-12,
    step_fraction: float = 0.995,
    accept_tol: float = 1e-8,
) -> LpSolution:
    """Solve ``lp`` and return a certified :class:`LpSolution`.

    The default ``tol`` is tighter than the 1e-8 contract so that objective
    values stay within 1e-8 of the exact optimum even when the optimal dual
    is large.

    Optimality is declared only when, on the unscaled iterate,
    ``|c x - b y| <= tol (1 + |c x|)``, ``||A x - b||_inf <= tol (1 + ||b||_inf)``
    and ``||c - A^T y - z||_inf <= tol (1 + ||c||_inf)``.  On degenerate
    problems the residuals can stall above ``tol`` once complementarity has
    collapsed; the best iterate seen is then accepted if it meets the same
    tests at ``accept_tol``.  Infeasible and unbounded problems are reported
    through the status, never raised.
    """
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return _hsd_solve(lp, tol, max_iter, regularization, step_fraction, accept_tol)


STALL_ITERATIONS = 15


def _hsd_solve(lp, tol, max_iter, regularization, step_fraction, accept_tol) -> LpSolution:
    A, b, c = lp.A_eq, lp.b_eq, lp.c
    m, n = A.shape
    x = np.ones(n)
    z = np.ones(n)
    y = np.zeros(m)
    tau = 1.0
    kappa = 1.0

    b_norm = float(np.max(np.abs(b))) if m else 0.0
    c_norm = float(np.max(np.abs(c)))

    def residuals(x, y, z, tau, kappa):
        rp = tau * b - A @ x
        rd = tau * c - A.T @ y - z
        rg = c @ x - b @ y + kappa
        return rp, rd, rg

    rp0, rd0, rg0 = residuals(x, y, z, tau, kappa)
    scale_p = max(1.0, float(np.linalg.norm(rp0)))
    scale_d = max(1.0, float(np.linalg.norm(rd0)))
    scale_g = max(1.0, abs(rg0))
    mu0 = (x @ z + tau * kappa) / (n + 1)

    def solve_newton(solve, dinv, rp, rd, rg, eta, rhs_xz, rhs_tk):
        # Block elimination of the HSD Newton system; see module docstring.
        w = rhs_xz / x - eta * rd
        ADinv = A * dinv
        p = solve(eta * rp - ADinv @ w)
        qv = solve(b + ADinv @ c)
        u = dinv * (A.T @ p + w)
        v = dinv * (A.T @ qv - c)
        denom = -c @ v + b @ qv + kappa / tau
        dtau = (eta * rg + c @ u - b @ p + rhs_tk / tau) / denom
        dx = u + v * dtau
        dy = p + qv * dtau
        dz = (rhs_xz - z * dx) / x
        dkappa = (rhs_tk - kappa * dtau) / tau
        return dx, dy, dz, dtau, dkappa

    status = LpStatus.NUMERICAL_FAILURE
    best_score, best, best_it = np.inf, None, 0
    it = 0
    for it in range(1, max_iter + 1):
        rp, rd, rg = residuals(x, y, z, tau, kappa)
        mu = (x @ z + tau * kappa) / (n + 1)

        xs, ys, zs = x / tau, y / tau, z / tau
        obj = float(c @ xs)
        dobj = float(b @ ys)
        p_res = float(np.max(np.abs(A @ xs - b))) if m else 0.0
        d_res = float(np.max(np.abs(c - A.T @ ys - zs)))
        gap = abs(obj - dobj)
        score = max(p_res / (1.0 + b_norm), d_res / (1.0 + c_norm), gap / (1.0 + abs(obj)))
        if score <= tol:
            status = LpStatus.OPTIMAL
            break
        if score < best_score:
            best_score, best, best_it = score, (x, y, z, tau), it
        elif best_score <= accept_tol and it - best_it >= STALL_ITERATIONS:
            break

        rho_p = np.linalg.norm(rp) / scale_p
        rho_d = np.linalg.norm(rd) / scale_d
        rho_g = abs(rg) / scale_g
        if rho_p < tol and rho_d < tol and rho_g < tol and tau < tol * max(1.0, kappa):
            status, y = _classify_ray(A, b, c, x, y, max(tol, 1e-9))
            break
        if mu / mu0 < tol * tol and tau < tol * max(1.0, kappa):
            status, y = _classify_ray(A, b, c, x, y, max(tol, 1e-9))
            break

        dinv = x / z
        M = (A * dinv) @ A.T
        solve = _factor(M, regularization)

        # predictor
        dx, dy, dz, dtau, dkappa = solve_newton(
            solve, dinv, rp, rd, rg, 1.0, -x * z, -tau * kappa
        )
        a_aff = min(1.0, _max_step(x, dx), _max_step(z, dz),
                    _max_step(np.array([tau]), np.array([dtau])),
                    _max_step(np.array([kappa]), np.array([dkappa])))
        mu_aff = ((x + a_aff * dx) @ (z + a_aff * dz)
                  + (tau + a_aff * dtau) * (kappa + a_aff * dkappa)) / (n + 1)
        sigma = (mu_aff / mu) ** 3

        # corrector
        rhs_xz = sigma * mu - x * z - dx * dz
        rhs_tk = sigma * mu - tau * kappa - dtau * dkappa
        dx, dy, dz, dtau, dkappa = solve_newton(
            solve, dinv, rp, rd, rg, 1.0 - sigma, rhs_xz, rhs_tk
        )
        a_max = min(_max_step(x, dx), _max_step(z, dz),
                    _max_step(np.array([tau]), np.array([dtau])),
                    _max_step(np.array([kappa]), np.array([dkappa])))
        step = min(1.0, step_fraction * a_max)
        if not np.isfinite(step) or step <= 0.0:
            break
        x = x + step * dx
        y = y + step * dy
        z = z + step * dz
        tau = tau + step * dtau
        kappa = kappa + step * dkappa
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(z)) and np.isfinite(tau)):
            break

    if status is LpStatus.NUMERICAL_FAILURE and best_score <= accept_tol:
        x, y, z, tau = best
        status = LpStatus.OPTIMAL
    xs, ys, zs = x / tau, y / tau, z / tau
    if status is LpStatus.OPTIMAL or status is LpStatus.NUMERICAL_FAILURE:
        obj = float(c @ xs)
        dobj = float(b @ ys)
        return LpSolution(
            x=xs,
            objective=obj,
            status=status,
            duality_gap=abs(obj - dobj),
            primal_residual=float(np.max(np.abs(A @ xs - b))) if m else 0.0,
            iterations=it,
            y=ys,
            z=zs,
            dual_objective=dobj,
            dual_residual=float(np.max(np.abs(c - A.T @ ys - zs))),
        )
    if status is LpStatus.INFEASIBLE:
        ray = y / max(float(np.max(np.abs(y))), np.finfo(float).tiny)
        return LpSolution(
            x=np.full(n, np.nan), objective=np.inf, status=status,
            duality_gap=np.nan, primal_residual=np.nan, iterations=it, y=ray,
        )
    ray = x / max(float(np.max(np.abs(x))), np.finfo(float).tiny)
    return LpSolution(
        x=ray, objective=-np.inf, status=status,
        duality_gap=np.nan, primal_residual=np.nan, iterations=it,
    )


def _farkas_ok(A, b, y, tol) -> bool:
    scale = float(np.max(np.abs(y))) if y.size else 0.0
    if scale == 0.0:
        return False
    y = y / scale
    return float(b @ y) > tol * (1.0 + float(np.max(np.abs(b)))) and float(np.max(A.T @ y)) <= tol


def _ray_ok(A, c, x, tol) -> bool:
    scale = float(np.max(np.abs(x)))
    if scale == 0.0:
        return False
    x = x / scale
    return float(c @ x) < -tol and float(np.max(np.abs(A @ x), initial=0.0)) <= tol


def _classify_ray(A, b, c, x, y, tol) -> tuple[LpStatus, np.ndarray]:
    """Decide which certificate the vanishing-tau iterate represents.

    A valid Farkas ray settles infeasibility.  A primal ray alone proves
    unboundedness only for a feasible problem, which is checked with a
    zero-cost solve.
    """
    if _farkas_ok(A, b, y, tol):
        return LpStatus.INFEASIBLE, y
    if _ray_ok(A, c, x, tol):
        phase_one = lp_solve(LinearProgram(np.zeros_like(c), A, b), tol=tol)
        if phase_one.status is LpStatus.OPTIMAL:
            return LpStatus.UNBOUNDED, y
        if phase_one.status is LpStatus.INFEASIBLE:
            return LpStatus.INFEASIBLE, phase_one.y
    return LpStatus.NUMERICAL_FAILURE, y
