"""Pure numpy implementation of the symmetrisation kernel.

Works on a uniform grid in ``x = ln s`` starting at ``x = 0``.  For every
node ``x_i`` it minimises

    g(y) = F(e^y) + e^y * F(e^{x_i - y}),   y in [0, x_i]

(``y = ln theta``) with a coarse scan followed by a fixed number of
golden-section steps, all nodes at once.  The compiled kernel in
``_tmap.pyx`` performs exactly the same arithmetic.

For ``a < 1`` the values ``F**a`` are interpolated linearly in ``s**a``:
the Matusita profile ``c |s**a - 1|**(1/a)``, which the map preserves,
is then represented exactly between nodes.
"""

import math

import numpy as np

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def interp_uniform(values, h, x, a=1.0):
    """Piecewise-linear interpolation on the nodes ``k*h`` with inf handling.

    With ``a = 1`` the interpolation is linear in ``x``; otherwise it is
    linear in ``exp(a*x)`` (i.e. in ``s**a`` when ``x = ln s``).  A segment
    with an infinite endpoint is infinite except at its finite endpoint.
    Points beyond the last node are infinite.
    """
    n = values.shape[0]
    u = x / h
    k = np.floor(u).astype(np.intp)
    k = np.clip(k, 0, n - 2)
    w = u - k
    w = np.where(w < 0.0, 0.0, w)
    if a != 1.0:
        w = np.expm1(a * h * w) / math.expm1(a * h)
    y0 = values[k]
    y1 = values[k + 1]
    with np.errstate(invalid="ignore"):
        out = y0 + w * (y1 - y0)
    inf0 = np.isinf(y0)
    inf1 = np.isinf(y1)
    out = np.where(inf0 | inf1, np.inf, out)
    out = np.where(inf1 & ~inf0 & (w == 0.0), y0, out)
    out = np.where(inf0 & ~inf1 & (w == 1.0), y1, out)
    out = np.where(u > n - 1 + 1e-12, np.inf, out)
    return out


def _objective(tvalues, h, x, y, inv_power):
    a = 1.0 / inv_power
    f1 = interp_uniform(tvalues, h, y, a)
    f2 = interp_uniform(tvalues, h, np.maximum(x - y, 0.0), a)
    if inv_power != 1.0:
        f1 = f1 ** inv_power
        f2 = f2 ** inv_power
    return f1 + np.exp(y) * f2


def apply_T_kernel(values, h, factor, n_scan=64, n_golden=80, power=1.0):
    """One application of the map on sampled values.

    Parameters
    ----------
    values : ndarray, shape (n,)
        ``F(e^{k h})`` for ``k = 0..n-1``; ``values[0]`` is ``F(1) = 0``.
    h : float
        Grid spacing in ``ln s``.
    factor : float
        Prefactor ``2**(1/a - 1)``.
    n_scan, n_golden : int
        Scan candidates per node and golden-section steps.
    power : float
        Interpolate ``F**power`` linearly in ``s**power`` and map back with
        the power ``1/power``; ``1`` is plain interpolation in ``ln s``.

    Returns
    -------
    ndarray, shape (n,)
    """
    values = np.ascontiguousarray(values, dtype=float)
    n = values.shape[0]
    inv_power = 1.0 / power
    tvalues = values if power == 1.0 else values ** power
    x = h * np.arange(n, dtype=float)
    # scan: candidates y = x_i * j / (n_scan - 1), endpoints included
    frac = np.arange(n_scan, dtype=float) / (n_scan - 1)
    Y = x[:, None] * frac[None, :]
    X = np.broadcast_to(x[:, None], Y.shape)
    G = _objective(tvalues, h, X, Y, inv_power)
    kbest = np.argmin(G, axis=1)
    rows = np.arange(n)
    best = G[rows, kbest]
    step = x / (n_scan - 1)
    a = np.maximum(Y[rows, kbest] - step, 0.0)
    b = np.minimum(Y[rows, kbest] + step, x)
    # golden-section refinement, vectorised over nodes
    y1 = b - INVPHI * (b - a)
    y2 = a + INVPHI * (b - a)
    f1 = _objective(tvalues, h, x, y1, inv_power)
    f2 = _objective(tvalues, h, x, y2, inv_power)
    for _ in range(n_golden):
        left = f1 <= f2
        # left: b <- y2, y2 <- y1, f2 <- f1, new y1
        # right: a <- y1, y1 <- y2, f1 <- f2, new y2
        a_new = np.where(left, a, y1)
        b_new = np.where(left, y2, b)
        y1_new = np.where(left, b_new - INVPHI * (b_new - a_new), y2)
        y2_new = np.where(left, y1, a_new + INVPHI * (b_new - a_new))
        f_probe = _objective(tvalues, h, x, np.where(left, y1_new, y2_new), inv_power)
        f1, f2 = np.where(left, f_probe, f2), np.where(left, f1, f_probe)
        a, b, y1, y2 = a_new, b_new, y1_new, y2_new
    best = np.minimum(best, np.minimum(f1, f2))
    out = factor * best
    out[0] = 0.0 if np.isfinite(values[0]) else np.inf
    return out
