"""Weak-threshold curves for standard, partial and hidden-partial l1.

Every characterization has the form

    P * sqrt(2/pi) * exp(-E**2) / D - sqrt(2) * E = 0,    E = erfinv(r)

with mode-dependent prefactor ``P``, denominator ``D`` and argument ``r``.
Two forms are exposed: the *theta* form (solve for the crossover ``theta``
at a given sparsity ``beta``, then evaluate the critical ``alpha`` from it)
and the *informal* form (a direct relation between ``alpha`` and ``beta``).
The two agree: the ``alpha`` returned by :func:`alpha_from_theta` is a root
of :func:`informal_residual`.

Sign convention used by the root finders: both residuals are negative on
the failure side of the curve and positive on the success side.
"""

from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .special import erfcinv, gaussian_weight

__all__ = [
    "Mode",
    "CurvePoint",
    "ThresholdCurve",
    "ThresholdError",
    "DomainError",
    "DegenerateInputError",
    "BracketError",
    "theta_residual",
    "theta_bracket",
    "solve_theta",
    "alpha_from_theta",
    "informal_residual",
    "alpha_threshold",
    "beta_threshold",
    "beta_bracket",
    "threshold_curve",
    "critical_alpha_informal",
]

log = logging.getLogger(__name__)

SQRT_2 = math.sqrt(2.0)
SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

THETA_MARGIN = 1e-12
BETA_MARGIN = 1e-9
BISECT_WIDTH = 1e-13
NEWTON_STEPS = 5
FD_STEP = 1e-7


class Mode(str, enum.Enum):
    STANDARD = "standard"
    PARTIAL = "partial"
    HIDDEN = "hidden"

    @classmethod
    def parse(cls, value: "Mode | str") -> "Mode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"unknown mode {value!r}; expected one of "
                + ", ".join(m.value for m in cls)
            ) from None


class ThresholdError(ValueError):
    """Base class for threshold-engine input and solver errors."""


class DomainError(ThresholdError):
    """An erfinv argument left (-1, 1) or a parameter left its admissible range."""


class DegenerateInputError(ThresholdError):
    """A characterization denominator is not strictly positive."""


class BracketError(ThresholdError):
    """The residual does not change sign over the search bracket."""

    def __init__(self, what: str, lo: float, hi: float, f_lo: float, f_hi: float):
        self.lo, self.hi, self.f_lo, self.f_hi = lo, hi, f_lo, f_hi
        super().__init__(
            f"no sign change for {what}: f({lo!r})={f_lo!r}, f({hi!r})={f_hi!r}"
        )


@dataclass(frozen=True)
class CurvePoint:
    """A point on a weak-threshold curve.

    ``saturated`` marks points where the residual kept the success sign over
    the whole admissible bracket (this happens for ``eta = 1``, where the
    analytic threshold is the bracket boundary itself); the residual fields
    then hold the values at that boundary instead of roots.
    """

    alpha: float
    beta: float
    theta_hat: float
    residual_theta: float
    residual_informal: float
    saturated: bool = False


@dataclass
class ThresholdCurve:
    """Result of a curve sweep: good points plus per-alpha failures."""

    mode: Mode
    eta: float
    points: list[CurvePoint] = field(default_factory=list)
    failures: list[tuple[float, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)


# ---------------------------------------------------------------------------
# parameter checks


def _effective_eta(eta: float, mode: Mode) -> float:
    if mode is Mode.STANDARD:
        return 0.0
    if not (0.0 <= eta <= 1.0) or math.isnan(eta):
        raise DomainError(f"eta={eta!r} outside [0, 1]")
    return float(eta)


def _check_beta(beta: float, eta: float, mode: Mode) -> None:
    if not 0.0 <= beta < 1.0:
        raise DomainError(f"beta={beta!r} outside [0, 1)")
    if mode is Mode.HIDDEN and 1.0 - 2.0 * beta + eta * beta <= 0.0:
        raise DomainError(f"hidden mode needs beta < 1/(2-eta); got beta={beta!r}, eta={eta!r}")


def _tail(q: float, what: str) -> float:
    """E = erfinv(1 - q), computed from the complement ``q`` directly."""
    if not 0.0 < q < 2.0:
        raise DomainError(f"erfinv argument for {what} outside (-1, 1): 1 - q with q={q!r}")
    return erfcinv(q)


# ---------------------------------------------------------------------------
# theta form


def _theta_parts(theta: float, beta: float, eta: float, mode: Mode):
    """(prefactor, r, E, denominator) for the theta-form equations."""
    if mode is Mode.HIDDEN:
        pre = 1.0 - 2.0 * beta + eta * beta
        r = (1.0 - theta - (1.0 - eta) * beta) / pre
        q = (theta - beta) / pre
        den = theta - eta * beta
    else:
        pre = 1.0 - beta
        r = (1.0 - theta) / pre
        q = (theta - beta) / pre
        den = theta if mode is Mode.STANDARD else theta - eta * beta
    if den <= 0.0:
        raise DegenerateInputError(f"theta - eta*beta = {den!r} <= 0")
    return pre, r, _tail(q, "theta residual"), den


def theta_residual(theta: float, beta: float, eta: float = 0.0, mode: Mode | str = Mode.STANDARD) -> float:
    """Left side minus right side of the equation defining the crossover theta."""
    mode = Mode.parse(mode)
    eta = _effective_eta(eta, mode)
    _check_beta(beta, eta, mode)
    pre, _, e, den = _theta_parts(theta, beta, eta, mode)
    return pre * SQRT_2_OVER_PI * gaussian_weight(e) / den - SQRT_2 * e


def theta_bracket(beta: float, eta: float = 0.0, mode: Mode | str = Mode.STANDARD) -> tuple[float, float]:
    mode = Mode.parse(mode)
    eta = _effective_eta(eta, mode)
    _check_beta(beta, eta, mode)
    if mode is Mode.HIDDEN:
        return max(beta, eta * beta) + THETA_MARGIN, 1.0 - beta + eta * beta - THETA_MARGIN
    return beta + THETA_MARGIN, 1.0 - THETA_MARGIN


def _find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    what: str,
    saturate_at: str,
) -> tuple[float, bool]:
    """Root of ``f`` on ``[lo, hi]`` by bisection then finite-difference Newton.

    ``saturate_at`` names the endpoint ("lo" or "hi") returned when ``f`` is
    positive at both ends, i.e. the success region fills the bracket.
    """
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo, False
    if f_hi == 0.0:
        return hi, False
    if (f_lo > 0.0) == (f_hi > 0.0):
        if f_lo > 0.0 and f_hi > 0.0:
            return (lo if saturate_at == "lo" else hi), True
        raise BracketError(what, lo, hi, f_lo, f_hi)

    a, b, f_a = lo, hi, f_lo
    for _ in range(200):
        if b - a <= BISECT_WIDTH:
            break
        mid = 0.5 * (a + b)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid, False
        if (f_mid > 0.0) == (f_a > 0.0):
            a, f_a = mid, f_mid
        else:
            b = mid

    x = 0.5 * (a + b)
    fx = f(x)
    for _ in range(NEWTON_STEPS):
        if fx == 0.0:
            break
        h = min(FD_STEP, 0.5 * (x - lo), 0.5 * (hi - x))
        if h <= 0.0:
            break
        slope = (f(x + h) - f(x - h)) / (2.0 * h)
        if slope == 0.0 or not math.isfinite(slope):
            break
        x_new = x - fx / slope
        if not lo <= x_new <= hi:
            break
        f_new = f(x_new)
        if abs(f_new) >= abs(fx):
            break
        x, fx = x_new, f_new
    return x, False


def _solve_theta(beta: float, eta: float, mode: Mode) -> tuple[float, bool]:
    lo, hi = theta_bracket(beta, eta, mode)
    return _find_root(
        lambda t: theta_residual(t, beta, eta, mode),
        lo,
        hi,
        what=f"theta ({mode.value}, beta={beta!r}, eta={eta!r})",
        saturate_at="lo",
    )


def solve_theta(beta: float, eta: float = 0.0, mode: Mode | str = Mode.STANDARD) -> float:
    """Crossover ``theta_hat`` solving the theta-form equation at sparsity ``beta``.

    Deterministic: bisection to a 1e-13 bracket followed by at most five
    finite-difference Newton steps that are kept only while they reduce the
    residual. When the residual is positive over the entire bracket (eta = 1)
    the lower bracket end is returned.

    Raises
    ------
    BracketError
        If the residual is negative at both bracket ends.
    """
    mode = Mode.parse(mode)
    eta = _effective_eta(eta, mode)
    return _solve_theta(beta, eta, mode)[0]


def alpha_from_theta(theta_hat: float, beta: float, eta: float = 0.0, mode: Mode | str = Mode.STANDARD) -> float:
    """Critical ``alpha`` for sparsity ``beta`` given the crossover ``theta_hat``.

    Evaluates the threshold expression term by term as stated (no algebraic
    simplification), so agreement with :func:`informal_residual` is a real
    consistency check rather than an identity.
    """
    mode = Mode.parse(mode)
    eta = _effective_eta(eta, mode)
    _check_beta(beta, eta, mode)
    pre, r, e, den = _theta_parts(theta_hat, beta, eta, mode)
    g = gaussian_weight(e)
    bracket = SQRT_2PI + 2.0 * math.sqrt(2.0 * e * e) * g - SQRT_2PI * r
    offset = (2.0 * beta - eta * beta) if mode is Mode.HIDDEN else beta
    return pre / SQRT_2PI * bracket + offset - (pre * SQRT_2_OVER_PI * g) ** 2 / den


# ---------------------------------------------------------------------------
# informal (boxed) form


def informal_residual(alpha: float, beta: float, eta: float = 0.0, mode: Mode | str = Mode.STANDARD) -> float:
    """Residual of the direct alpha-beta characterization of the weak threshold."""
    mode = Mode.parse(mode)
    eta = _effective_eta(eta, mode)
    _check_beta(beta, eta, mode)
    if mode is Mode.HIDDEN:
        pre = 1.0 - 2.0 * beta + eta * beta
        q = (alpha - (2.0 - eta) * beta) / pre
        den = alpha - beta
    else:
        pre = 1.0 - beta
        q = (alpha - beta) / pre
        den = alpha if mode is Mode.STANDARD else alpha - eta * beta
    if den <= 0.0:
        raise DegenerateInputError(f"informal denominator {den!r} <= 0 at alpha={alpha!r}, beta={beta!r}")
    e = _tail(q, "informal residual")
    return pre * SQRT_2_OVER_PI * gaussian_weight(e) / den - SQRT_2 * e


def beta_bracket(alpha: float, eta: float = 0.0, mode: Mode | str = Mode.STANDARD) -> tuple[float, float]:
    """Admissible search interval for the critical beta at fixed alpha.

    The erfinv argument stays below 1 only for ``beta < alpha`` (standard,
    partial) or ``beta < alpha / (2 - eta)`` (hidden).
    """
    mode = Mode.parse(mode)
    eta = _effective_eta(eta, mode)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha={alpha!r} outside (0, 1)")
    upper = alpha / (2.0 - eta) if mode is Mode.HIDDEN else alpha
    return BETA_MARGIN, upper - BETA_MARGIN


def alpha_threshold(beta: float, eta: float = 0.0, mode: Mode | str = Mode.STANDARD) -> CurvePoint:
    """Critical alpha at sparsity ``beta`` via the theta form.

    Above the returned alpha the program recovers with overwhelming
    probability; below it some fixed-pattern vector is not recovered.
    """
    mode = Mode.parse(mode)
    eta = _effective_eta(eta, mode)
    theta, saturated = _solve_theta(beta, eta, mode)
    alpha = alpha_from_theta(theta, beta, eta, mode)
    return CurvePoint(
        alpha=alpha,
        beta=beta,
        theta_hat=theta,
        residual_theta=theta_residual(theta, beta, eta, mode),
        residual_informal=_informal_or_nan(alpha, beta, eta, mode),
        saturated=saturated,
    )


def _informal_or_nan(alpha: float, beta: float, eta: float, mode: Mode) -> float:
    try:
        return informal_residual(alpha, beta, eta, mode)
    except ThresholdError:
        return math.nan


def beta_threshold(alpha: float, eta: float = 0.0, mode: Mode | str = Mode.STANDARD) -> CurvePoint:
    """Critical beta at undersampling ratio ``alpha`` via the direct form.

    Bisects :func:`informal_residual` in beta after checking that it is
    positive (success) at the small-beta end and negative at the large-beta
    end. If the residual stays positive up to the admissible bound, as for
    ``eta = 1``, the bound itself is returned with ``saturated=True``.

    Raises
    ------
    BracketError
        If the residual is already negative at the small-beta end.
    """
    mode = Mode.parse(mode)
    eta = _effective_eta(eta, mode)
    lo, hi = beta_bracket(alpha, eta, mode)
    beta, saturated = _find_root(
        lambda b: informal_residual(alpha, b, eta, mode),
        lo,
        hi,
        what=f"beta ({mode.value}, alpha={alpha!r}, eta={eta!r})",
        saturate_at="hi",
    )
    theta, theta_saturated = _solve_theta(beta, eta, mode)
    return CurvePoint(
        alpha=alpha,
        beta=beta,
        theta_hat=theta,
        residual_theta=theta_residual(theta, beta, eta, mode),
        residual_informal=informal_residual(alpha, beta, eta, mode),
        saturated=saturated or theta_saturated,
    )


def threshold_curve(alphas: Iterable[float], eta: float = 0.0, mode: Mode | str = Mode.STANDARD) -> ThresholdCurve:
    """Critical beta for every alpha in an increasing grid.

    Per-point failures are recorded in ``failures`` instead of aborting the
    sweep. A decrease of beta along the grid is reported through
    :mod:`warnings` and stored in ``warnings``.
    """
    mode = Mode.parse(mode)
    alphas = [float(a) for a in alphas]
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alphas must be strictly increasing")
    curve = ThresholdCurve(mode=mode, eta=_effective_eta(eta, mode))
    for a in alphas:
        try:
            curve.points.append(beta_threshold(a, curve.eta, mode))
        except ThresholdError as exc:
            log.warning("threshold point alpha=%r failed: %s", a, exc)
            curve.failures.append((a, str(exc)))
    for p, q in zip(curve.points, curve.points[1:]):
        if q.beta < p.beta:
            msg = f"beta decreased from {p.beta!r} to {q.beta!r} between alpha={p.alpha!r} and {q.alpha!r}"
            curve.warnings.append(msg)
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return curve


def critical_alpha_informal(beta: float, eta: float = 0.0, mode: Mode | str = Mode.STANDARD) -> tuple[float, bool]:
    """Root in alpha of :func:`informal_residual` at fixed ``beta``.

    Independent of the theta form; used for two-form cross-checks.
    """
    mode = Mode.parse(mode)
    eta = _effective_eta(eta, mode)
    _check_beta(beta, eta, mode)
    lower = (2.0 - eta) * beta if mode is Mode.HIDDEN else beta
    return _find_root(
        lambda a: informal_residual(a, beta, eta, mode),
        lower + THETA_MARGIN,
        1.0 - THETA_MARGIN,
        what=f"alpha ({mode.value}, beta={beta!r}, eta={eta!r})",
        saturate_at="lo",
    )


def betas_at(alpha: float, etas: Sequence[float], mode: Mode | str) -> list[float]:
    return [beta_threshold(alpha, e, mode).beta for e in etas]
