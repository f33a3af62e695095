"""Scalar special functions shared by the bound computations.

All rates and log-expectations are in nats.
"""

from __future__ import annotations

import numpy as np
from scipy.special import exp1 as _scipy_exp1

EULER_GAMMA = float(np.euler_gamma)

# E[|log W|] for W ~ Exp(1); equals gamma + 2*E1(1)
LOG_MOMENT_K = EULER_GAMMA + 2.0 * float(_scipy_exp1(1.0))

# below this threshold log1p(x)/x loses digits to cancellation
_THETA_SERIES_CUTOFF = 1e-4


def theta(x):
    """log(1+x)/x, continuously extended to 1 at x = 0.

    Defined for x > -1; positive and strictly decreasing. Accepts scalars
    or arrays.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= -1.0):
        raise ValueError("theta requires x > -1")
    small = np.abs(x) < _THETA_SERIES_CUTOFF
    xs = np.where(small, 1.0, x)  # placeholder avoids 0/0 in the masked lane
    series = 1.0 - x / 2.0 + x**2 / 3.0 - x**3 / 4.0
    out = np.where(small, series, np.log1p(np.where(small, 0.0, x)) / xs)
    if out.ndim == 0:
        return float(out)
    return out


def exp_int_e1(x):
    """Exponential integral E1(x) = int_x^inf e^-u / u du, x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("exp_int_e1 requires x > 0")
    out = _scipy_exp1(x)
    if out.ndim == 0:
        return float(out)
    return out


def _exp1_scaled(x: float) -> float:
    """e^x * E1(x) for x > 0, stable for large x.

    Direct product is fine below the exp overflow threshold; beyond that a
    Lentz-style continued fraction for the scaled function is used.
    """
    if x <= 500.0:
        return float(np.exp(x) * _scipy_exp1(x))
    # e^x E1(x) = 1/(x+1-1/(x+3-4/(x+5-9/(...)))) (modified Lentz)
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 200):
        a = -float(i) * float(i)
        b += 2.0
        d = a * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + a / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return h


def expected_log_affine(a: float, c: float) -> float:
    """E[log(a*W + c)] for W ~ Exp(mean 1), in closed form.

    Equals log(c) + e^{c/a} E1(c/a) for a > 0 and log(c) for a = 0.
    """
    if c <= 0.0:
        raise ValueError("expected_log_affine requires c > 0")
    if a < 0.0:
        raise ValueError("expected_log_affine requires a >= 0")
    if a == 0.0:
        return float(np.log(c))
    return float(np.log(c) + _exp1_scaled(c / a))


def g_diag(t: float, a: float) -> float:
    """g(t; a) = log(1 + a*t) + Ei(-1/t) for t > 0, a >= 1.

    Monotonically nondecreasing in t, with g(t; a) -> gamma + log(a) as
    t -> inf. Used as a high-SNR gap diagnostic.
    """
    if t <= 0.0:
        raise ValueError("g_diag requires t > 0")
    if a < 1.0:
        raise ValueError("g_diag requires a >= 1")
    return float(np.log1p(a * t) - _scipy_exp1(1.0 / t))
