"""Numerical audits of triangle inequalities.

Costless case: by symmetry and 1-homogeneity, ``H**a`` is a metric on
``[0, inf)`` iff

    H(u,1)**a <= v**a * H(u/v,1)**a + H(v,1)**a      for 0 <= u < v < 1,

which is checked on a grid plus random pairs.  Also provides the Kafka
monotonicity certificate, concave-transform checks and a bisection for the
largest metric power.
"""

import math
from dataclasses import dataclass

import numpy as np

SEED = 0x5EED
TOL_TRI = 1e-9
TOL_MONO = 1e-10
GRID_N = 200
N_RANDOM = 1000


@dataclass
class TriangleReport:
    """Outcome of a triangle-inequality audit.

    ``worst_violation`` is the largest ``LHS - RHS`` seen (negative when the
    inequality holds with room to spare); ``witness`` is the worst pair /
    configuration.
    """

    passed: bool
    worst_violation: float
    witness: dict | None
    tested_count: int
    skipped: int = 0
    reason: str = ""

    def to_dict(self):
        return {
            "schema": 1,
            "passed": bool(self.passed),
            "worst_violation": float(self.worst_violation),
            "witness": self.witness,
            "tested": int(self.tested_count),
            "skipped": int(self.skipped),
            "reason": self.reason,
        }


def uv_pairs(n=GRID_N, n_random=N_RANDOM, seed=SEED):
    """Grid pairs ``0 <= u < v < 1`` plus random pairs (fixed seed).

    The grid uses ``{0} ∪ {k/(n+1)}``; the random pairs are uniform on the
    triangle.
    """
    g = np.concatenate([[0.0], np.arange(1, n + 1) / (n + 1.0)])
    U, V = np.meshgrid(g, g, indexing="ij")
    m = U < V
    u, v = U[m], V[m]
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, size=(n_random, 2))
    ru, rv = np.min(x, axis=1), np.max(x, axis=1)
    keep = ru < rv
    return np.concatenate([u, ru[keep]]), np.concatenate([v, rv[keep]])


def check_costless_triangle(H, a, u_grid=GRID_N, n_random=N_RANDOM, seed=SEED, tol=TOL_TRI):
    """Audit the one-variable triangle inequality for ``H**a``.

    Parameters
    ----------
    H : callable
        Vectorised evaluator ``(r, t) -> H(r, t)``, symmetric and 1-homogeneous.
    a : float in (0, 1]
    u_grid : int
        Grid resolution per axis.

    Returns
    -------
    TriangleReport
        If ``H(0, 1) = inf`` the necessary condition fails and the report
        is negative with that reason.

    Examples
    --------
    >>> tv = lambda r, t: np.abs(np.asarray(r) - np.asarray(t))
    >>> check_costless_triangle(tv, 1.0).passed
    True
    """
    if not (0.0 < a <= 1.0):
        raise ValueError("a must lie in (0, 1]")
    h0 = float(np.asarray(H(np.array([0.0]), np.array([1.0])))[0])
    if math.isinf(h0):
        return TriangleReport(False, math.inf, {"u": 0.0, "v": None}, 0, 0,
                              "necessary condition fails: H(u,1) -> inf as u -> 0")
    u, v = uv_pairs(u_grid, n_random, seed)
    one = np.ones_like(u)
    with np.errstate(all="ignore"):
        lhs = np.asarray(H(u, one), dtype=float) ** a
        r1 = np.asarray(H(u / v, one), dtype=float) ** a
        r2 = np.asarray(H(v, one), dtype=float) ** a
        rhs = v ** a * r1 + r2
    skip = np.isinf(lhs)
    viol = np.where(skip, -np.inf, lhs - rhs)
    viol = np.where(np.isinf(rhs) & ~skip, -np.inf, viol)
    k = int(np.argmax(viol))
    worst = float(viol[k])
    passed = worst <= tol
    witness = {"u": float(u[k]), "v": float(v[k])}
    return TriangleReport(passed, worst, witness, int(np.sum(~skip)), int(np.sum(skip)))


@dataclass
class KafkaProfile:
    u: np.ndarray
    h: np.ndarray
    max_increase: float

    def to_dict(self):
        return {"max_increase": float(self.max_increase), "samples": int(self.u.size)}


def kafka_certificate(H, a, n=2000, u_max=0.99, tol=TOL_MONO):
    """Check that ``h(u) = (1 - u**a)**(1/a) / H(u, 1)`` is nonincreasing.

    ``h`` is sampled on ``(0, u_max]``; the upper cut keeps ``H(u,1)`` away
    from the 0/0 regime at ``u = 1`` where rounding dominates.  A positive
    answer implies the triangle inequality for ``H**a``.

    Returns
    -------
    bool, KafkaProfile
        ``max_increase`` is the largest relative step ``(h_{k+1} - h_k) / max|h|``.
    """
    u = np.linspace(0.0, u_max, n + 1)[1:]
    with np.errstate(all="ignore"):
        h = (1.0 - u ** a) ** (1.0 / a) / np.asarray(H(u, np.ones_like(u)), dtype=float)
    fin = np.isfinite(h)
    hf = h[fin]
    if hf.size < 2:
        return False, KafkaProfile(u, h, math.inf)
    inc = float(np.max(np.diff(hf)) / max(1e-300, float(np.max(np.abs(hf)))))
    return inc <= tol, KafkaProfile(u, h, inc)


def concave_transform_check(f, d_samples, tol=1e-12):
    """Check on samples the conditions under which ``f(d)`` is a metric for every metric ``d``.

    Verifies ``f(0) = 0``, ``f > 0`` on positive samples, midpoint
    concavity and subadditivity ``f(x+y) <= f(x) + f(y)`` over all sample
    pairs.  ``f`` must accept numpy arrays.

    Examples
    --------
    >>> d = np.linspace(0, 3, 31)
    >>> concave_transform_check(np.sqrt, d), concave_transform_check(np.square, d)
    (True, False)
    """
    d = np.asarray(d_samples, dtype=float)
    d = np.unique(d[d >= 0])
    f0 = float(np.asarray(f(np.array([0.0])))[0])
    if abs(f0) > tol:
        return False
    pos = d[d > 0]
    fp = np.asarray(f(pos), dtype=float)
    if np.any(fp <= 0):
        return False
    X, Y = np.meshgrid(d, d, indexing="ij")
    fx = np.asarray(f(X), dtype=float)
    fy = np.asarray(f(Y), dtype=float)
    scale = tol * np.maximum(1.0, np.abs(fx) + np.abs(fy))
    mid = np.asarray(f(0.5 * (X + Y)), dtype=float)
    if np.any(mid < 0.5 * (fx + fy) - scale):
        return False
    sub = np.asarray(f(X + Y), dtype=float)
    if np.any(sub > fx + fy + scale):
        return False
    return True


def max_metric_power(H, a_lo=0.01, a_hi=1.0, tol=1e-3, **kwargs):
    """Largest ``a`` in ``[a_lo, a_hi]`` for which ``H**a`` passes the audit.

    Bisection relies on downward closure (a metric stays a metric under the
    concave map ``x -> x**(b/a)``, ``b <= a``).  Returns ``None`` when even
    ``a_lo`` fails.
    """
    if not (0.0 < a_lo < a_hi <= 1.0):
        raise ValueError("need 0 < a_lo < a_hi <= 1")

    def ok(a):
        return check_costless_triangle(H, a, **kwargs).passed

    if ok(a_hi):
        return a_hi
    if not ok(a_lo):
        return None
    lo, hi = a_lo, a_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo
