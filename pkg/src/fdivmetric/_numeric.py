"""Small numeric helpers: extended-value arithmetic and interpolation."""

import math

import numpy as np

INF = math.inf


def xmul(a, b):
    """Product on ``[0, inf]`` with the convention ``0 * inf = 0``."""
    if a == 0.0 or b == 0.0:
        return 0.0
    return a * b


def xmul_array(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        out = a * b
    out = np.where((a == 0.0) | (b == 0.0), 0.0, out)
    return out


def interp_extended(x, xs, ys, extrapolate_slope=False):
    """Piecewise-linear interpolation that tolerates ``inf`` node values.

    A segment with an infinite endpoint is infinite everywhere except at its
    finite endpoint, which keeps the interpolant lower semicontinuous.
    Outside ``[xs[0], xs[-1]]`` the result is ``inf`` unless
    ``extrapolate_slope`` is set, in which case the last finite segment is
    continued to the right.
    """
    x = np.asarray(x, dtype=float)
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    n = len(xs)
    idx = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, n - 2)
    x0 = xs[idx]
    x1 = xs[idx + 1]
    y0 = ys[idx]
    y1 = ys[idx + 1]
    w = (x - x0) / (x1 - x0)
    with np.errstate(invalid="ignore"):
        out = y0 + w * (y1 - y0)
    inf0 = np.isinf(y0)
    inf1 = np.isinf(y1)
    out = np.where(inf0 | inf1, INF, out)
    out = np.where(inf1 & ~inf0 & (w == 0.0), y0, out)
    out = np.where(inf0 & ~inf1 & (w == 1.0), y1, out)
    out = np.where(x < xs[0], INF, out)
    right = x > xs[-1]
    if extrapolate_slope and np.isfinite(ys[-1]) and np.isfinite(ys[-2]):
        slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        out = np.where(right, ys[-1] + slope * (x - xs[-1]), out)
    else:
        out = np.where(right, INF, out)
    return out
