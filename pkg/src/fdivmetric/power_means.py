"""Power means of two nonnegative numbers."""

import numpy as np

#: below this |p| the log-domain expansion replaces the direct formula
P_SWITCH = 1e-6


def power_mean(p, r, t):
    """Power mean ``((r**p + t**p) / 2) ** (1/p)`` with all edge conventions.

    ``p = 0`` gives the geometric mean, ``p = -inf`` / ``+inf`` the minimum /
    maximum, and for ``p < 0`` the mean vanishes as soon as one argument does.
    Broadcasts over ``r`` and ``t``; scalars in, float out.

    Examples
    --------
    >>> power_mean(1, 1, 3)
    2.0
    >>> power_mean(0, 4, 9)
    6.0
    >>> power_mean(-1, 0, 5)
    0.0
    """
    r_arr = np.asarray(r, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    scalar = r_arr.ndim == 0 and t_arr.ndim == 0
    r_arr, t_arr = np.broadcast_arrays(r_arr, t_arr)
    lo = np.minimum(r_arr, t_arr)
    hi = np.maximum(r_arr, t_arr)
    p = float(p)
    out = np.zeros(hi.shape)

    if p == np.inf:
        out[...] = hi
    elif p == -np.inf:
        out[...] = lo
    elif p == 0.0:
        out[...] = np.sqrt(lo) * np.sqrt(hi)
    elif p > 0:
        pos = hi > 0
        h = hi[pos]
        x = lo[pos] / h
        if p < P_SWITCH:
            res = h * 0.5 ** (1.0 / p)
            nz = x > 0
            lx = np.log(x[nz])
            res[nz] = h[nz] * np.exp(0.5 * lx + p * lx * lx / 8.0)
            out[pos] = res
        else:
            # scaled by the max: x**p <= 1 cannot overflow
            out[pos] = h * (0.5 * (1.0 + x ** p)) ** (1.0 / p)
    else:
        pos = lo > 0
        m = lo[pos]
        y = hi[pos] / m
        if -p < P_SWITCH:
            ly = np.log(y)
            out[pos] = m * np.exp(0.5 * ly + p * ly * ly / 8.0)
        else:
            # scaled by the min: y**p <= 1 for p < 0
            out[pos] = m * (0.5 * (1.0 + y ** p)) ** (1.0 / p)
    if scalar:
        return float(out)
    return out
