"""Log-domain helpers for quantities far below the floating-point range."""
import math

import numpy as np
from scipy.special import logsumexp

LN2 = math.log(2.0)
LN3 = math.log(3.0)


def log1mexp(x):
    """Return ln(1 - exp(x)) for x <= 0 without cancellation.

    Uses expm1 near zero and log1p in the tail (Maechler's switch at -ln 2).
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(x > -LN2, np.log(-np.expm1(x)), np.log1p(-np.exp(x)))
    return out[()] if out.ndim == 0 else out


def log_sub(la, lb):
    """ln(exp(la) - exp(lb)) for la > lb."""
    return la + log1mexp(lb - la)


def lse(values):
    """Log-sum-exp of a 1-D sequence."""
    return float(logsumexp(np.asarray(values, dtype=float)))


def circle_distance(x, center):
    """Distance on the unit circle between angle(s) x and center, in [0, pi]."""
    # nearest-multiple remainder keeps tiny offsets of either sign exact
    y = np.asarray(x, dtype=float) - center
    out = np.abs(y - 2.0 * np.pi * np.round(y / (2.0 * np.pi)))
    return out[()] if out.ndim == 0 else out


def wrap_angle(x):
    """Reduce to [0, 2 pi); np.mod alone can return 2 pi for tiny negative inputs."""
    y = np.mod(np.asarray(x, dtype=float), 2.0 * np.pi)
    y = np.where(y >= 2.0 * np.pi, 0.0, y)
    return y[()] if y.ndim == 0 else y
