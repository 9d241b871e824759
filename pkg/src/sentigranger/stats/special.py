"""Log-gamma, regularized incomplete beta and the F distribution CDF."""
from __future__ import annotations

import math

from ..errors import DomainError, NonConvergenceError

MAX_ITER = 300
_EPS = 1e-16
_TINY = 1e-300


def ln_gamma(z: float) -> float:
    """Natural log of the gamma function for ``z > 0``."""
    if not z > 0 or math.isinf(z):
        raise DomainError(f"ln_gamma needs a finite positive argument, got {z}", z=z)
    return math.lgamma(z)


def ln_beta(a: float, b: float) -> float:
    return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)


def _beta_cf(x: float, a: float, b: float) -> float:
    # modified Lentz evaluation of the continued fraction for I_x(a, b)
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise NonConvergenceError(
        f"incomplete beta continued fraction did not converge for x={x}, a={a}, b={b}",
        x=x, a=a, b=b)


def _inc_beta(x: float, y: float, a: float, b: float) -> tuple[float, float]:
    # (I_x(a, b), 1 - I_x(a, b)) with y = 1 - x supplied by the caller, so that
    # arguments close to 1 keep their precision
    if x == 0.0:
        return 0.0, 1.0
    if y == 0.0:
        return 1.0, 0.0
    log_front = a * math.log(x) + b * math.log(y) - ln_beta(a, b)
    if x <= (a + 1.0) / (a + b + 2.0):
        lower = math.exp(log_front) * _beta_cf(x, a, b) / a
        return lower, 1.0 - lower
    upper = math.exp(log_front) * _beta_cf(y, b, a) / b
    return 1.0 - upper, upper


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta function ``I_x(a, b)``.

    The continued fraction converges fastest below ``(a + 1) / (a + b + 2)``;
    above it the symmetry ``I_x(a, b) = 1 - I_{1-x}(b, a)`` is used instead.
    """
    if not (0.0 <= x <= 1.0) or not a > 0 or not b > 0 or math.isinf(a) or math.isinf(b):
        raise DomainError(f"reg_inc_beta domain violated: x={x}, a={a}, b={b}", x=x, a=a, b=b)
    return _inc_beta(x, 1.0 - x, a, b)[0]


def _f_beta_args(x: float, d1: float, d2: float, name: str) -> tuple[float, float]:
    if not x >= 0:
        raise DomainError(f"{name} needs x >= 0, got {x}", x=x)
    if not d1 > 0 or not d2 > 0 or math.isinf(d1) or math.isinf(d2):
        raise DomainError(f"degrees of freedom must be finite and positive, got ({d1}, {d2})")
    if math.isinf(x):
        return 1.0, 0.0
    num = d1 * x
    return num / (num + d2), d2 / (num + d2)


def f_cdf(x: float, d1: float, d2: float) -> float:
    """CDF of the F distribution with ``(d1, d2)`` degrees of freedom."""
    z, w = _f_beta_args(x, d1, d2, "f_cdf")
    return _inc_beta(z, w, d1 / 2.0, d2 / 2.0)[0]


def f_sf(x: float, d1: float, d2: float) -> float:
    """Upper tail ``1 - F(x)``, without cancellation for large ``x``."""
    z, w = _f_beta_args(x, d1, d2, "f_sf")
    return _inc_beta(z, w, d1 / 2.0, d2 / 2.0)[1]
