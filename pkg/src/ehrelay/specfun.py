"""Real-valued exponential-integral kernels on the positive axis.

The outage closed forms consume E1 and Ei only through products of the form
e^x * E1(x) and e^-x * Ei(x) whose arguments blow up as the power-splitting
fraction approaches 0 or 1, so scaled variants are provided that stay finite
for arguments far beyond the overflow threshold of a bare exponential.

Algorithm split: ascending power series for small arguments, a modified
Lentz continued fraction for E1 at x >= 1, and the divergent-but-optimally-
truncated asymptotic series for Ei at x >= 40.  Target accuracy is 1e-12
relative, far below any model tolerance in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EULER_GAMMA = 0.5772156649015328606065121

_SERIES_CUTOFF_E1 = 1.0
_SERIES_CUTOFF_EI = 40.0
_SERIES_EPS = 1e-18
_CF_EPS = 5e-16
_CF_MAX_ITER = 500_000
_TINY = 1e-300
_ULP = 2.220446049250313e-16


@dataclass(frozen=True)
class SpecFunResult:
    """Function value plus a conservative absolute-error estimate."""

    value: float
    est_abs_error: float


def _require_positive(x: float, name: str) -> None:
    if not x > 0.0:
        raise ValueError(f"{name} is only defined for positive arguments, got {x!r}")


def _e1_series(x: float) -> tuple[float, float]:
    """E1(x) = -gamma - ln x + sum_{k>=1} (-1)^(k+1) x^k / (k * k!), x < 1."""
    total = 0.0
    term = 1.0
    last = 0.0
    for k in range(1, 80):
        term *= x / k
        last = term / k
        total += last if k % 2 == 1 else -last
        if abs(last) < _SERIES_EPS * max(1.0, abs(total)):
            break
    value = -EULER_GAMMA - math.log(x) + total
    err = abs(last) + 8.0 * _ULP * (abs(value) + abs(math.log(x)) + 1.0)
    return value, err


def _e1_cf_scaled(x: float) -> tuple[float, float]:
    """e^x * E1(x) = 1 / (x+1 - 1^2/(x+3 - 2^2/(x+5 - ...))), modified Lentz."""
    f = x + 1.0
    c = f
    d = 0.0
    delta = 0.0
    for k in range(1, _CF_MAX_ITER + 1):
        num = -float(k * k)
        den = x + 2.0 * k + 1.0
        d = den + num * d
        if d == 0.0:
            d = _TINY
        c = den + num / c
        if c == 0.0:
            c = _TINY
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < _CF_EPS:
            break
    value = 1.0 / f
    err_rel = abs(delta - 1.0) + 4.0 * _ULP
    return value, value * err_rel


def _ei_series(x: float) -> tuple[float, float]:
    """Ei(x) = gamma + ln x + sum_{k>=1} x^k / (k * k!), all terms positive."""
    total = 0.0
    term = 1.0
    n = 0
    for k in range(1, 400):
        term *= x / k
        contrib = term / k
        total += contrib
        n = k
        if contrib < _SERIES_EPS * total:
            break
    value = EULER_GAMMA + math.log(x) + total
    err = n * _ULP * abs(value) + term / max(n, 1)
    return value, err


def _ei_asymptotic_scaled(x: float) -> tuple[float, float]:
    """e^-x * Ei(x) ~ (1/x) sum_{k>=0} k!/x^k, truncated at the smallest term."""
    total = 0.0
    term = 1.0
    k = 0
    while True:
        total += term
        k += 1
        nxt = term * k / x
        if nxt >= term or nxt < _SERIES_EPS * total:
            break
        term = nxt
    return total / x, (nxt + k * _ULP * total) / x


def e1(x: float) -> SpecFunResult:
    """First exponential integral, integral from x to infinity of e^-t/t dt.

    Strictly decreasing; underflows to exactly 0.0 near x ~ 745 rather than
    raising.  Raises ValueError for x <= 0.
    """
    _require_positive(x, "e1")
    if x < _SERIES_CUTOFF_E1:
        return SpecFunResult(*_e1_series(x))
    scaled, err = _e1_cf_scaled(x)
    damp = math.exp(-x)
    return SpecFunResult(scaled * damp, err * damp + 2.0 * _ULP * scaled * damp)


def exp_e1_scaled(x: float) -> float:
    """e^x * E1(x), finite for x up to 1e6 and beyond.

    Sandwiched between 1/(1+x) and 1/x for every x > 0.
    """
    _require_positive(x, "exp_e1_scaled")
    if x < _SERIES_CUTOFF_E1:
        value, _ = _e1_series(x)
        return math.exp(x) * value
    return _e1_cf_scaled(x)[0]


def ei(x: float) -> SpecFunResult:
    """Exponential integral Ei, Cauchy principal value on the positive axis.

    Overflows to +inf above x ~ 709 (double range).  Raises ValueError for
    x <= 0.
    """
    _require_positive(x, "ei")
    if x < _SERIES_CUTOFF_EI:
        return SpecFunResult(*_ei_series(x))
    scaled, err = _ei_asymptotic_scaled(x)
    try:
        grow = math.exp(x)
    except OverflowError:
        return SpecFunResult(math.inf, math.inf)
    return SpecFunResult(scaled * grow, err * grow + 2.0 * _ULP * scaled * grow)


def exp_ei_scaled(x: float) -> float:
    """e^-x * Ei(x), finite for arbitrarily large x."""
    _require_positive(x, "exp_ei_scaled")
    if x < _SERIES_CUTOFF_EI:
        value, _ = _ei_series(x)
        return math.exp(-x) * value
    return _ei_asymptotic_scaled(x)[0]
