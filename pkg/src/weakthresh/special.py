"""Error function and its inverse in double precision.

``erf``/``erfc`` delegate to the C library through :mod:`math`.  The inverse
starts from Giles' single-precision rational approximation and is polished
by Newton iterations against ``erf`` (central region) or against
``log(erfc)`` (tails), so arguments close to +-1 keep their digits.
"""

from __future__ import annotations

import math

__all__ = ["erf", "erfc", "erfinv", "erfcinv", "gaussian_weight"]

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)

# |p| above this switches to the complementary (tail) formulation
_TAIL_SWITCH = 0.5
_NEWTON_STEPS = 6
# Giles' polynomial is fitted for float32 arguments; below this log(q) it diverges
_GILES_TAIL_LIMIT = -25.0


def erf(x: float) -> float:
    """Error function, odd by construction."""
    return math.copysign(math.erf(abs(x)), x)


def erfc(x: float) -> float:
    return math.erfc(x)


def _giles_seed(p: float, one_minus_p2: float) -> float:
    """Rational starting guess for erfinv(p); ~1e-7 relative accuracy.

    ``one_minus_p2`` is ``(1 - p) * (1 + p)`` supplied by the caller so the
    tail branch can pass it without cancellation.
    """
    w = -math.log(one_minus_p2)
    if w < 5.0:
        w -= 2.5
        c = 2.81022636e-08
        c = 3.43273939e-07 + c * w
        c = -3.5233877e-06 + c * w
        c = -4.39150654e-06 + c * w
        c = 0.00021858087 + c * w
        c = -0.00125372503 + c * w
        c = -0.00417768164 + c * w
        c = 0.246640727 + c * w
        c = 1.50140941 + c * w
    else:
        w = math.sqrt(w) - 3.0
        c = -0.000200214257
        c = 0.000100950558 + c * w
        c = 0.00134934322 + c * w
        c = -0.00367342844 + c * w
        c = 0.00573950773 + c * w
        c = -0.0076224613 + c * w
        c = 0.00943887047 + c * w
        c = 1.00167406 + c * w
        c = 2.83297682 + c * w
    return c * p


def _tail_inverse(q: float) -> float:
    """Positive x with erfc(x) = q for 0 < q <= 1 - _TAIL_SWITCH."""
    log_q = math.log(q)
    if log_q > _GILES_TAIL_LIMIT:
        x = _giles_seed(1.0 - q, q * (2.0 - q))
    else:
        # erfc(x) ~ exp(-x^2) / (x sqrt(pi)) for large x
        x = math.sqrt(-log_q)
        x = math.sqrt(-log_q - math.log(x * math.sqrt(math.pi)))
    for _ in range(_NEWTON_STEPS):
        ec = math.erfc(x)
        if ec == 0.0:
            break
        # Newton on log(erfc(x)) - log(q); d/dx log erfc = -2/sqrt(pi) e^{-x^2} / erfc
        log_ec = math.log(ec)
        slope = _TWO_OVER_SQRT_PI * math.exp(-x * x - log_ec)
        step = (log_ec - log_q) / slope
        x += step
        if abs(step) <= 1e-16 * x:
            break
    return x


def erfcinv(q: float) -> float:
    """Inverse complementary error function on (0, 2).

    Raises
    ------
    ValueError
        If ``q`` lies outside the open interval (0, 2).
    """
    if not 0.0 < q < 2.0:
        raise ValueError(f"erfcinv argument {q!r} outside (0, 2)")
    if q <= 1.0 - _TAIL_SWITCH:
        return _tail_inverse(q)
    if q >= 1.0 + _TAIL_SWITCH:
        return -_tail_inverse(2.0 - q)
    return erfinv(1.0 - q)


def erfinv(p: float) -> float:
    """Inverse error function on (-1, 1).

    Satisfies ``|erf(erfinv(p)) - p| <= 1e-12`` and is exactly odd.

    Raises
    ------
    ValueError
        If ``p`` is not strictly inside (-1, 1); callers clamp endpoints.
    """
    if not -1.0 < p < 1.0:
        raise ValueError(f"erfinv argument {p!r} outside (-1, 1)")
    a = abs(p)
    if a == 0.0:
        return p
    if a > _TAIL_SWITCH:
        # 1 - a is exact here (Sterbenz)
        return math.copysign(_tail_inverse(1.0 - a), p)
    x = _giles_seed(a, (1.0 - a) * (1.0 + a))
    for _ in range(_NEWTON_STEPS):
        step = (math.erf(x) - a) / (_TWO_OVER_SQRT_PI * math.exp(-x * x))
        x -= step
        if abs(step) <= 1e-16 * x:
            break
    return math.copysign(x, p)


def gaussian_weight(x: float) -> float:
    """``exp(-x**2)``; underflows to 0.0 rather than producing NaN."""
    if math.isinf(x):
        return 0.0
    return math.exp(-x * x)
