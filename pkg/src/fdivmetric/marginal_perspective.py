"""Costless marginal perspective functions.

For an admissible entropy ``F`` the marginal perspective function is

    H_F(r, t) = min_{theta in [min(r,t), max(r,t)]}  F^(theta, r) + F^(theta, t),

where ``F^`` is the perspective of ``F``.  This module provides hand-coded
closed forms for the built-in families, a convex-minimisation oracle that
works for any entropy, and bulk evaluation on grids.
"""

import math

import numpy as np

from ._numeric import INF, xmul
from ._optimize import boundary_limit, golden_section
from .entropy import (
    ChiAlpha,
    DoublePower,
    Indicator,
    Matusita,
    PowerLike,
    PowerLog,
    TotalVariationScaled,
    perspective,
)
from .power_means import power_mean

#: relative bracket width of the golden-section search over theta
TOL_THETA = 1e-12
#: range of k in the boundary sequence eps = 2**-k
BOUNDARY_K = (10, 40)
BOUNDARY_RTOL = 1e-9


class ClosedFormUnavailable(LookupError):
    """Raised when an entropy has no hand-coded marginal perspective."""


def _xlogx(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)


# ----------------------------------------------------------------------
# closed forms (vectorised, valid on the closed quadrant unless noted)


def _h_indicator(F, r, t):
    a, b = F.a, F.b
    # a/b <= r/t <= b/a  <=>  a*r <= b*t and a*t <= b*r  (0 * inf = 0)
    with np.errstate(invalid="ignore"):
        br = np.where(r == 0, 0.0, b * r)
        bt = np.where(t == 0, 0.0, b * t)
    ok = (a * r <= bt) & (a * t <= br)
    return np.where(ok, 0.0, INF)


def _h_chi(F, r, t):
    al = F.alpha
    s = r + t
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.abs(r - t) ** al / s ** (al - 1.0)
    return np.where(s == 0, 0.0, out)


def _h_tv(F, r, t):
    return F.c * np.abs(r - t)


def _h_matusita(F, r, t):
    a = F.a
    return 2.0 ** (1.0 - 1.0 / a) * np.abs(r ** a - t ** a) ** (1.0 / a)


def _h_powerlike(F, r, t):
    p = F.p
    if p == 1.0:
        return (np.sqrt(r) - np.sqrt(t)) ** 2
    if p == 0.0:
        s = r + t
        return _xlogx(r) + _xlogx(t) - _xlogx(s) + s * math.log(2.0)
    out = (2.0 / p) * (0.5 * (r + t) - power_mean(1.0 - p, r, t))
    return np.maximum(out, 0.0)


def _h_powerlog(F, r, t):
    p = F.p
    s = r + t
    both = (r > 0) & (t > 0)
    rs = np.where(both, r, 1.0)
    ts = np.where(both, t, 1.0)
    lr, lt = np.log(rs), np.log(ts)
    inner = lr + lt + np.log(rs ** (p - 1.0) + ts ** (p - 1.0)) - np.log(rs + ts)
    out = (rs + ts) * inner - p * (rs * lt + ts * lr)
    out = np.maximum(out, 0.0)
    # boundary: l.s.c. limits along the segment towards the axis
    edge = 0.0 if p == 1.0 else INF
    bnd = np.where(s == 0, 0.0, np.where(p == 1.0, s * math.log(2.0), edge))
    return np.where(both, out, bnd)


def _doublepower_interior(p, q, r, t):
    # bracket in log form: [p log(r^{q-1}+t^{q-1}) - q log(r^{p-1}+t^{p-1})]/(p-q)
    L = (p * np.log(r ** (q - 1.0) + t ** (q - 1.0)) - q * np.log(r ** (p - 1.0) + t ** (p - 1.0))) / (p - q)
    out = (q - p) * (r * t * np.exp(L) - (r + t))
    return np.maximum(out, 0.0)


def _h_doublepower(F, r, t):
    p, q = F.p, F.q
    both = (r > 0) & (t > 0)
    rs = np.where(both, r, 1.0)
    ts = np.where(both, t, 1.0)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        out = _doublepower_interior(p, q, rs, ts)
    if np.all(both):
        return out
    out = np.array(out, dtype=float)
    for idx in zip(*np.nonzero(~both)):
        ri, ti = float(r[idx]), float(t[idx])
        if ri == 0.0 and ti == 0.0:
            out[idx] = 0.0
        else:
            # no boundary formula is available: numeric l.s.c. envelope along
            # the axis direction, which allows far smaller eps than r + eps
            out[idx] = boundary_limit(
                lambda e: float(_doublepower_interior(p, q, np.float64(ri or e), np.float64(ti or e))),
                (10, 1000),
                1e-12,
            )
    return out


_CLOSED = {
    Indicator: _h_indicator,
    ChiAlpha: _h_chi,
    TotalVariationScaled: _h_tv,
    Matusita: _h_matusita,
    PowerLike: _h_powerlike,
    PowerLog: _h_powerlog,
    DoublePower: _h_doublepower,
}


def has_closed_form(F):
    return type(F) in _CLOSED


def h_closed(F, r, t):
    """Closed-form marginal perspective ``H_F(r, t)``.

    Broadcasts over ``r`` and ``t``.  Boundary values (``r = 0`` or
    ``t = 0``) are the lower semicontinuous limits of the interior formula.

    Raises
    ------
    ClosedFormUnavailable
        If ``F`` is not one of the built-in families.

    Examples
    --------
    >>> from fdivmetric.entropy import PowerLike, ChiAlpha
    >>> h_closed(PowerLike(1.0), 1.0, 4.0)
    1.0
    >>> h_closed(ChiAlpha(2.0), 1.0, 3.0)
    1.0
    """
    fn = _CLOSED.get(type(F))
    if fn is None:
        raise ClosedFormUnavailable(f"no closed-form marginal perspective for {F!r}")
    r_arr = np.asarray(r, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    if np.any(r_arr < 0) or np.any(t_arr < 0):
        raise ValueError("marginal perspective needs r, t >= 0")
    scalar = r_arr.ndim == 0 and t_arr.ndim == 0
    r_arr, t_arr = np.broadcast_arrays(np.atleast_1d(r_arr), np.atleast_1d(t_arr))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.asarray(fn(F, r_arr, t_arr), dtype=float)
    out = np.where(r_arr == t_arr, 0.0, out)
    return float(out[0]) if scalar else out


# ----------------------------------------------------------------------
# oracle


def _theta_interval(F, r, t):
    """Part of ``[min(r,t), max(r,t)]`` where both perspectives can be finite."""
    lo, hi = min(r, t), max(r, t)
    for m in (r, t):
        lo = max(lo, xmul(F.dom_lo, m))
        hi = min(hi, xmul(F.dom_hi, m) if m > 0 else hi)
    return lo, hi


def _oracle_interior(F, r, t, tol=TOL_THETA):
    lo, hi = _theta_interval(F, r, t)
    if lo > hi:
        return INF, None

    def obj(theta):
        return perspective(F, theta, r) + perspective(F, theta, t)

    theta, val = golden_section(obj, lo, hi, tol=tol)
    return val, theta


def h_oracle(F, r, t, tol=TOL_THETA, return_theta=False):
    """Marginal perspective by direct convex minimisation over ``theta``.

    The minimiser lies between ``r`` and ``t``, so a golden-section search on
    that interval (intersected with the effective domain) is globally
    correct.  When exactly one argument vanishes the lower semicontinuous
    envelope is returned, computed as the limit of ``H(r + eps, t + eps)``
    along ``eps = 2**-k``.

    Parameters
    ----------
    F : Entropy
    r, t : float
        Nonnegative masses.
    return_theta : bool
        Also return the minimiser (``None`` on the boundary or when the
        value is infinite).

    Examples
    --------
    >>> from fdivmetric.entropy import PowerLike
    >>> val, theta = h_oracle(PowerLike(1.0), 1.0, 4.0, return_theta=True)
    >>> round(val, 10), round(theta, 6)
    (1.0, 2.0)
    """
    r, t = float(r), float(t)
    if r < 0 or t < 0:
        raise ValueError("marginal perspective needs r, t >= 0")
    if r == t:
        res = (0.0, r)
    elif r > 0 and t > 0:
        res = _oracle_interior(F, r, t, tol)
    else:
        val = boundary_limit(
            lambda e: _oracle_interior(F, r + e, t + e, tol)[0],
            BOUNDARY_K,
            BOUNDARY_RTOL,
        )
        res = (val, None)
    return res if return_theta else res[0]


# ----------------------------------------------------------------------
# evaluator object and grids


class MarginalPerspective:
    """Callable ``H_F`` that prefers the closed form and falls back to the oracle.

    ``MarginalPerspective(F)(r, t)`` broadcasts like a numpy ufunc.
    """

    def __init__(self, source, use_closed=True):
        self.source = source
        self.closed_form = _CLOSED.get(type(source)) if use_closed else None

    def __call__(self, r, t):
        if self.closed_form is not None:
            return h_closed(self.source, r, t)
        r_arr, t_arr = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(t, dtype=float))
        out = np.empty(r_arr.shape)
        for idx in np.ndindex(r_arr.shape):
            out[idx] = h_oracle(self.source, r_arr[idx], t_arr[idx])
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        kind = "closed" if self.closed_form is not None else "oracle"
        return f"MarginalPerspective({self.source!r}, {kind})"


def h_grid(F, grid):
    """Symmetric matrix ``H_F(g_i, g_j)`` over a sorted grid.

    Examples
    --------
    >>> from fdivmetric.entropy import PowerLike
    >>> h_grid(PowerLike(1.0), [0.0, 1.0, 4.0]).tolist()
    [[0.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]]
    """
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("h_grid needs a non-empty one-dimensional grid")
    if np.any(np.diff(g) < 0):
        raise ValueError("h_grid needs a sorted grid")
    if has_closed_form(F):
        out = h_closed(F, g[:, None], g[None, :])
        return np.minimum(out, out.T)
    n = g.size
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = h_oracle(F, g[i], g[j])
    return out


def h_grid_rows(F, grid):
    """Flattened ``(r, t, H)`` rows of :func:`h_grid`, for CSV output."""
    g = np.asarray(grid, dtype=float)
    H = h_grid(F, g)
    return [(float(g[i]), float(g[j]), float(H[i, j])) for i in range(g.size) for j in range(g.size)]
