"""Marginal perspective costs and the cone over a finite metric space.

``H_c(r1, r2) = inf_{theta >= 0} F^(theta, r1) + F^(theta, r2) + c * theta``
(``F^`` the perspective of ``F``) adds a linear transport term to the
costless marginal perspective.  With ``F = U_p`` and ``c = d**2`` it has
closed forms in terms of power means; this module evaluates them, the
primal and dual oracles, the natural cone metric, the transformed cost
``H̄_p`` and the counterexamples for ``p < 1``.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from ._numeric import INF, xmul
from ._optimize import golden_section
from .entropy import conjugate_inverse, perspective, perspective_array
from .metric_check import SEED, TOL_TRI, TriangleReport, check_costless_triangle
from .power_means import power_mean

TOL_DUAL = 1e-6
N_DUAL_SCAN = 128
N_PRIMAL_SCAN = 400
#: span of the logarithmic search for small minimisers theta
LOG_SPAN = 700.0


# ----------------------------------------------------------------------
# metric spaces and cone points


class MetricSpaceError(ValueError):
    pass


class FiniteMetricSpace:
    """Finite metric space given by its distance matrix (validated).

    Examples
    --------
    >>> X = FiniteMetricSpace.path(3)
    >>> float(X.d[0, 2])
    2.0
    """

    def __init__(self, d, tol=1e-12):
        d = np.array(d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
            raise MetricSpaceError("distance matrix must be square and non-empty")
        if np.any(~np.isfinite(d)) or np.any(d < 0):
            raise MetricSpaceError("distances must be finite and nonnegative")
        if not np.allclose(d, d.T, rtol=0, atol=tol):
            raise MetricSpaceError("distance matrix must be symmetric")
        if np.any(np.abs(np.diag(d)) > tol):
            raise MetricSpaceError("distance matrix must have a zero diagonal")
        n = d.shape[0]
        off = ~np.eye(n, dtype=bool)
        if np.any(d[off] <= 0):
            raise MetricSpaceError("distinct points must have positive distance")
        # d(i,k) <= d(i,j) + d(j,k)
        viol = d[:, None, :] - (d[:, :, None] + d[None, :, :])
        if np.max(viol) > tol * max(1.0, float(np.max(d))):
            raise MetricSpaceError("triangle inequality violated by the distance matrix")
        self.d = d
        self.d.setflags(write=False)

    @property
    def n(self):
        return self.d.shape[0]

    @classmethod
    def euclidean(cls, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        diff = pts[:, None, :] - pts[None, :, :]
        return cls(np.sqrt(np.sum(diff ** 2, axis=-1)))

    @classmethod
    def path(cls, n, edge=1.0):
        idx = np.arange(n, dtype=float)
        return cls(edge * np.abs(idx[:, None] - idx[None, :]))

    @classmethod
    def single(cls):
        return cls([[0.0]])

    @classmethod
    def load_csv(cls, path):
        """Distance matrix from a CSV file (one row per line, no header)."""
        with open(path, newline="") as fh:
            rows = [[float(x) for x in row] for row in csv.reader(fh) if row and not row[0].startswith("#")]
        return cls(rows)

    def scaled(self, lam):
        return FiniteMetricSpace(lam * self.d)


@dataclass(frozen=True)
class ConePoint:
    """Point ``(x, r)`` of the cone; all points with ``r = 0`` are the apex."""

    point_index: int
    radius: float

    def __eq__(self, other):
        if not isinstance(other, ConePoint):
            return NotImplemented
        if self.radius == 0.0 and other.radius == 0.0:
            return True
        return self.radius == other.radius and self.point_index == other.point_index

    def __hash__(self):
        return hash((None, 0.0)) if self.radius == 0.0 else hash((self.point_index, self.radius))


# ----------------------------------------------------------------------
# H_c: primal and dual


def _theta_bounds(F, r1, r2):
    """Interval of theta where both perspectives can be finite."""
    hi = max(r1, r2)
    lo = 0.0
    for m in (r1, r2):
        if m > 0:
            lo = max(lo, xmul(F.dom_lo, m))
            hi = min(hi, xmul(F.dom_hi, m))
        elif math.isinf(F.FprimeInf):
            hi = 0.0
    return lo, hi


def h_cost_primal(F, c, r1, r2, tol=1e-12):
    """``inf_theta F^(theta, r1) + F^(theta, r2) + c*theta`` over ``theta >= 0``.

    The objective is convex in ``theta`` and its minimiser lies in
    ``[0, max(r1, r2)]``; it is searched by golden section in ``log theta``
    (quasi-convexity survives the monotone change of variable), which
    resolves minimisers many orders of magnitude below ``max(r1, r2)``;
    a coarse scan brackets the minimum first.  The result is compared
    with the endpoint ``theta = 0``.  ``c = inf`` gives ``F(0) (r1 + r2)``.

    Examples
    --------
    >>> from fdivmetric.entropy import PowerLike
    >>> round(h_cost_primal(PowerLike(1.0), 2.0, 1.0, 1.0), 10) == round(2 * (1 - math.exp(-1)), 10)
    True
    """
    c, r1, r2 = float(c), float(r1), float(r2)
    if c < 0 or r1 < 0 or r2 < 0:
        raise ValueError("need c, r1, r2 >= 0")
    if r1 == 0.0 and r2 == 0.0:
        return 0.0
    if math.isinf(c):
        return xmul(F.F0, r1 + r2)

    def obj(theta):
        return perspective(F, theta, r1) + perspective(F, theta, r2) + c * theta

    best = obj(0.0)
    lo, hi = _theta_bounds(F, r1, r2)
    if hi <= 0.0 or lo > hi:
        return best
    if lo == hi:
        return min(best, obj(lo))
    a = math.log(lo) if lo > 0 else math.log(hi) - LOG_SPAN
    b = math.log(hi)
    # the objective is nearly flat for tiny theta, where golden-section ties
    # would discard the wrong side: bracket the minimum by a scan first
    zs = np.linspace(a, b, N_PRIMAL_SCAN)
    th = np.exp(zs)
    vals = (perspective_array(F, th, np.full_like(th, r1)) + perspective_array(F, th, np.full_like(th, r2))
            + c * th)
    vals = np.where(np.isnan(vals), INF, vals)
    k = int(np.argmin(vals))
    za, zb = zs[max(k - 1, 0)], zs[min(k + 1, zs.size - 1)]
    _, val = golden_section(lambda z: obj(math.exp(z)), za, zb, tol=tol)
    return min(best, float(vals[k]), val)


def _dual_psi(R, y, y_lo, y_hi, psi_lo, psi_hi):
    """Inverse of ``R*`` with the endpoint limits of its range."""
    if y <= y_lo:
        return psi_lo
    if y >= y_hi:
        return psi_hi
    return conjugate_inverse(R, y)


def h_cost_dual(F, c, r1, r2, n_scan=N_DUAL_SCAN, tol=1e-12):
    """Dual value ``sup { r1 psi1 + r2 psi2 : R*(psi1) + R*(psi2) <= c }``.

    ``R*`` (conjugate of the reverse entropy) maps ``(-aff F_inf, F(0))``
    increasingly onto ``(-F'_inf, -F'_0)``.  The constraint is active at
    the optimum, so the supremum is a one-dimensional concave maximisation
    over ``y = R*(psi1)``, ``psi2 = (R*)^{-1}(c - y)``: a scan over
    ``n_scan`` points followed by golden section.  Unbounded ranges are
    handled by expanding the bracket around ``c/2``.

    Examples
    --------
    >>> from fdivmetric.entropy import PowerLike
    >>> round(h_cost_dual(PowerLike(1.0), 0.0, 1.0, 4.0), 8)
    1.0
    """
    c, r1, r2 = float(c), float(r1), float(r2)
    if c < 0 or r1 < 0 or r2 < 0:
        raise ValueError("need c, r1, r2 >= 0")
    if r1 == 0.0 and r2 == 0.0:
        return 0.0
    if math.isinf(c):
        return xmul(F.F0, r1 + r2)
    R = F.reverse()
    y_lo, y_hi = -F.FprimeInf, -F.Fprime0
    psi_lo, psi_hi = -F.affInf, F.F0
    if y_hi < INF and c >= 2.0 * y_hi:
        # both multipliers reach the top of the domain
        return xmul(psi_hi, r1) + xmul(psi_hi, r2)

    def value(y):
        p1 = _dual_psi(R, y, y_lo, y_hi, psi_lo, psi_hi)
        p2 = _dual_psi(R, c - y, y_lo, y_hi, psi_lo, psi_hi)
        v1 = xmul(r1, p1) if p1 >= 0 else (-xmul(r1, -p1))
        v2 = xmul(r2, p2) if p2 >= 0 else (-xmul(r2, -p2))
        v = v1 + v2
        return -INF if math.isnan(v) else v

    a = max(y_lo, c - y_hi)
    b = min(y_hi, c - y_lo)
    mid = 0.5 * c
    if math.isinf(a):
        L = 1.0
        while value(mid - 2 * L) > value(mid - L) and L < 2.0 ** 60:
            L *= 2.0
        a = mid - 2 * L
    if math.isinf(b):
        L = 1.0
        while value(mid + 2 * L) > value(mid + L) and L < 2.0 ** 60:
            L *= 2.0
        b = mid + 2 * L
    ys = np.linspace(a, b, n_scan)
    vals = [value(y) for y in ys]
    k = int(np.argmax(vals))
    lo = ys[max(k - 1, 0)]
    hi = ys[min(k + 1, n_scan - 1)]
    _, neg = golden_section(lambda y: -value(y), lo, hi, tol=tol)
    return max(-neg, vals[k])


def h_cost(F, c, r1, r2):
    """Alias for the primal evaluation."""
    return h_cost_primal(F, c, r1, r2)


def h_cost_array(F, c, r1, r2):
    """Vectorised ``H_c(r1, r2)`` (broadcasting); closed form for ``U_p``.

    ``c = inf`` gives ``F(0) (r1 + r2)``.  Families without a closed form
    fall back to :func:`h_cost_primal` elementwise.
    """
    c, r1, r2 = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (c, r1, r2)))
    inf_c = np.isinf(c)
    if type(F).__name__ == "PowerLike":
        with np.errstate(invalid="ignore"):
            out = np.asarray(h_p_cone(F.p, np.sqrt(np.where(inf_c, 0.0, c)), r1, r2), dtype=float)
    else:
        out = np.vectorize(lambda cc, a, b: h_cost_primal(F, cc, a, b) if math.isfinite(cc) else 0.0,
                           otypes=[float])(c, r1, r2)
    with np.errstate(invalid="ignore"):
        top = np.where((r1 + r2) == 0.0, 0.0, F.F0 * (r1 + r2))
    out = np.where(inf_c, top, out)
    return float(out) if out.ndim == 0 else out


# ----------------------------------------------------------------------
# closed forms for U_p with cost d**2


def cost_factor(p, d):
    """``(1 + (1-p) d**2 / 2)_+ ** (p/(p-1))`` (``exp(-d**2/2)`` at ``p = 1``)."""
    d = np.asarray(d, dtype=float)
    if p == 1.0:
        return np.exp(-0.5 * d * d)
    base = np.maximum(1.0 + (1.0 - p) * 0.5 * d * d, 0.0)
    with np.errstate(divide="ignore"):
        return base ** (p / (p - 1.0))


def h_p_cone(p, d, r, t):
    """Closed-form marginal perspective cost of ``U_p`` with cost ``d**2``.

    Broadcasts over ``d``, ``r`` and ``t``.

    Examples
    --------
    >>> h_p_cone(1.0, 0.0, 1.0, 4.0)
    1.0
    >>> round(h_p_cone(0.0, 1.0, 0.0, 1.0), 12) == round(math.log(3.0), 12)
    True
    """
    p = float(p)
    d = np.asarray(d, dtype=float)
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    scalar = d.ndim == 0 and r.ndim == 0 and t.ndim == 0
    d, r, t = np.broadcast_arrays(np.atleast_1d(d), np.atleast_1d(r), np.atleast_1d(t))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if p == 0.0:
            s = r + t
            xr = np.where(r > 0, r * np.log(np.where(r > 0, r, 1.0)), 0.0)
            xt = np.where(t > 0, t * np.log(np.where(t > 0, t, 1.0)), 0.0)
            out = xr + xt - np.where(s > 0, s * np.log(np.where(s > 0, s, 1.0) / (2.0 + d * d)), 0.0)
        elif p == 1.0:
            out = 2.0 * (0.5 * (r + t) - power_mean(0.0, r, t) * cost_factor(1.0, d))
        else:
            m = power_mean(1.0 - p, r, t)
            k = cost_factor(p, d)
            # 0 * inf = 0 when the mean vanishes (p > 1, one radius zero)
            prod = np.where(m == 0.0, 0.0, m * k)
            out = (2.0 / p) * (0.5 * (r + t) - prod)
    out = np.where((r == t) & (d == 0.0), 0.0, out)
    out = np.where(np.isnan(out), INF, out)
    out = np.maximum(out, 0.0)
    return float(out[0]) if scalar else out


def f_p(p, d):
    """Concave transform ``arccos[(1 - (p-1) d**2/2)_+ ** (p/(p-1))]``; ``arccos(exp(-d**2/2))`` at ``p = 1``."""
    return np.arccos(np.clip(cost_factor(p, d), 0.0, 1.0))


def h_bar_p(p, angle, r, t):
    """``M_1(r,t) - M_{1-p}(r,t) cos(angle ∧ pi/2)``.

    ``angle`` is a distance on the space; for the comparison with
    :func:`h_p_cone` use ``angle = f_p(p, d)``.
    """
    angle = np.minimum(np.asarray(angle, dtype=float), 0.5 * math.pi)
    out = 0.5 * (np.asarray(r, dtype=float) + np.asarray(t, dtype=float)) - power_mean(1.0 - p, r, t) * np.cos(angle)
    out = np.maximum(out, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def cone_metric(d, r1, r2):
    """Natural cone distance ``sqrt(r1^2 + r2^2 - 2 r1 r2 cos(d ∧ pi))``.

    Examples
    --------
    >>> cone_metric(0.0, 1.0, 3.0), cone_metric(math.pi, 1.0, 1.0)
    (2.0, 2.0)
    """
    d = np.minimum(np.asarray(d, dtype=float), math.pi)
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    sq = r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * np.cos(d)
    out = np.sqrt(np.maximum(sq, 0.0))
    return float(out) if np.ndim(out) == 0 else out


def theta_p(p, r, t):
    """``M_{1-p}(r,t) / M_0(r,t)``."""
    return power_mean(1.0 - p, r, t) / power_mean(0.0, r, t)


# ----------------------------------------------------------------------
# triangle audits on the cone


def _sqrt_h(p, D, a, b):
    return np.sqrt(h_p_cone(p, D, a, b))


def cone_triples(X, samples, seed=SEED, zero_prob=0.1):
    """Random triples ``(i, j, k, r, s, t)`` plus corner-radius stress triples."""
    rng = np.random.default_rng(seed)
    n = X.n
    idx = rng.integers(0, n, size=(samples, 3))
    rad = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), size=(samples, 3)))
    rad = np.where(rng.uniform(size=(samples, 3)) < zero_prob, 0.0, rad)
    corners = np.array([0.0, 1e-9, 1.0, 10.0])
    ci = np.array(np.meshgrid(corners, corners, corners, indexing="ij")).reshape(3, -1).T
    pts = np.array(np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")).reshape(3, -1).T
    stress_idx = np.repeat(pts, len(ci), axis=0)
    stress_rad = np.tile(ci, (len(pts), 1))
    return np.vstack([idx, stress_idx]), np.vstack([rad, stress_rad])


def check_cone_triangle(p, X, samples=10_000, seed=SEED, tol=TOL_TRI, scales=(1.0, 4.0)):
    """Audit ``sqrt(H_p)`` as a metric on the cone over ``X``.

    Each triple is tested with every vertex as the middle point, for the
    metric ``X`` and its scaled copies (large scales push the effective
    angle past ``pi/2``).

    Returns
    -------
    TriangleReport
    """
    if p < 1:
        raise ValueError("the cone triangle audit needs p >= 1; use counterexample_p_below_one for p < 1")
    idx, rad = cone_triples(X, samples, seed)
    worst = -INF
    witness = None
    tested = 0
    for lam in scales:
        D = lam * X.d
        for a, b, m in ((0, 2, 1), (0, 1, 2), (1, 2, 0)):
            ia, ib, im = idx[:, a], idx[:, b], idx[:, m]
            ra, rb, rm = rad[:, a], rad[:, b], rad[:, m]
            lhs = _sqrt_h(p, D[ia, ib], ra, rb)
            rhs = _sqrt_h(p, D[ia, im], ra, rm) + _sqrt_h(p, D[im, ib], rm, rb)
            viol = lhs - rhs
            k = int(np.argmax(viol))
            tested += viol.size
            if viol[k] > worst:
                worst = float(viol[k])
                witness = {
                    "scale": lam,
                    "points": [int(ia[k]), int(im[k]), int(ib[k])],
                    "radii": [float(ra[k]), float(rm[k]), float(rb[k])],
                }
    return TriangleReport(worst <= tol, worst, witness, tested)


def _triangle_margin(p, r, s, t, d12, d23, d13):
    lhs = math.sqrt(h_p_cone(p, d13, r, t))
    rhs = math.sqrt(h_p_cone(p, d12, r, s)) + math.sqrt(h_p_cone(p, d23, s, t))
    return lhs, rhs, lhs - rhs


def counterexample_p_below_one(p, max_doublings=40):
    """A configuration violating the triangle inequality for ``sqrt(H_p)``, ``p < 1``.

    ``p <= 1/2``: apex pair ``r = s = 0``, ``t = 1`` with ``d13 = d12 > 0``,
    ``d23 = 0`` (``p > 0`` and ``p = 0``), or ``0 < r < s < t`` with a large
    ``d13 = d12`` (``p < 0``).  ``1/2 < p < 1``: the costless witness on a
    single point.  The distance is searched upward until the violation
    shows.

    Returns
    -------
    dict
        ``r, s, t, d12, d23, d13, lhs, rhs, margin`` (``margin > 0``).
    """
    p = float(p)
    if p >= 1:
        raise ValueError("counterexamples exist only for p < 1")
    if 0.5 < p < 1:
        from .marginal_perspective import MarginalPerspective
        from .entropy import PowerLike

        rep = check_costless_triangle(MarginalPerspective(PowerLike(p)), 0.5)
        u, v = rep.witness["u"], rep.witness["v"]
        r, s, t, D = u, v, 1.0, 0.0
        lhs, rhs, margin = _triangle_margin(p, r, s, t, 0.0, 0.0, 0.0)
        if margin <= 0:
            raise RuntimeError("costless witness did not reproduce")
        return _cx(p, r, s, t, 0.0, 0.0, 0.0, lhs, rhs)
    if p >= 0:
        r, s, t, D = 0.0, 0.0, 1.0, 1.0
    else:
        r, s, t, D = 0.1, 0.5, 1.0, 10.0
    for _ in range(max_doublings):
        lhs, rhs, margin = _triangle_margin(p, r, s, t, D, 0.0, D)
        if margin > 0:
            return _cx(p, r, s, t, D, 0.0, D, lhs, rhs)
        D *= 2.0
    raise RuntimeError(f"no violating configuration found for p={p}")


def _cx(p, r, s, t, d12, d23, d13, lhs, rhs):
    return {
        "schema": 1,
        "p": p,
        "r": r,
        "s": s,
        "t": t,
        "d12": d12,
        "d23": d23,
        "d13": d13,
        "lhs": lhs,
        "rhs": rhs,
        "margin": lhs - rhs,
    }


# ----------------------------------------------------------------------
# final inequality audit


def final_inequality_sides(p, u, v):
    """Left side in ``u`` and right side in ``v`` of the final inequality."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    one_u = np.ones_like(u)
    one_v = np.ones_like(v)
    m0u = power_mean(0.0, u, one_u)
    lhs = (1.0 + np.sqrt(u)) ** 2 * (m0u - power_mean(-1.0, u, one_u)) / (m0u - power_mean(1.0 - p, u, one_u))
    rhs = np.sqrt(v) * (1.0 + 4.0 * v) / (power_mean(0.0, one_v, v) - power_mean(1.0 - p, one_v, v))
    return lhs, rhs


def default_final_grids(n=100):
    """Log grids accumulating at 1: ``u = 1 - 10**[-4, log10(1-1e-6)]``, ``v = 1 + 10**[-4, 4]``."""
    u = 1.0 - np.logspace(-4.0, math.log10(1.0 - 1e-6), n)
    v = 1.0 + np.logspace(-4.0, 4.0, n)
    return u, v


def final_inequality_check(p, u_grid=None, v_grid=None):
    """Check ``sup_u LHS(u) <= inf_v RHS(v)`` on grids (``p > 1``).

    Returns
    -------
    bool, dict
        The dict holds ``sup_lhs``, ``inf_rhs`` and the reference value
        ``4/(p-1)`` for the supremum of the left side.
    """
    if p <= 1:
        raise ValueError("the final inequality concerns p > 1")
    if u_grid is None or v_grid is None:
        du, dv = default_final_grids()
        u_grid = du if u_grid is None else u_grid
        v_grid = dv if v_grid is None else v_grid
    lhs, rhs = final_inequality_sides(p, u_grid, v_grid)
    sup_l = float(np.max(lhs))
    inf_r = float(np.min(rhs))
    info = {"p": p, "sup_lhs": sup_l, "inf_rhs": inf_r, "reference_sup": 4.0 / (p - 1.0)}
    return sup_l <= inf_r, info
