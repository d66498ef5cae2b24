"""Discrete Optimal Entropy-Transport.

For masses ``r`` (on ``m`` points), ``t`` (on ``n`` points), a cost matrix
``c`` with entries in ``[0, inf]`` and a superlinear entropy ``F``:

    E(gamma) = sum_i r_i F(a_i / r_i) + sum_j t_j F(b_j / t_j) + sum_ij c_ij gamma_ij

with ``a = gamma.sum(1)``, ``b = gamma.sum(0)``, and the homogeneous form

    H(gamma) = sum_ij H_{c_ij}(r_i / a_i, t_j / b_j) gamma_ij.

Both have the same infimum over plans.  :func:`solve` minimises ``E``;
:func:`brute_force_et` minimises both on grids (tiny instances only).
"""

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._numeric import INF
from ._optimize import scan_then_golden
from .cone_cost import h_cost_array
from .entropy import DiscreteMeasure, make_entropy
from .marginal_perspective import MarginalPerspective
from .power_means import power_mean

TOL_SOLVE = 1e-8
MAX_ITERS = 100_000
COERCIVITY_FACTOR = 3.0
GRID_PER_ENTRY = 50
ZOOM_ROUNDS = 40
ZOOM_POINTS = 9
MAX_BRUTE_ENTRIES = 4
#: derivative of F is evaluated no closer to 0 than this
S_FLOOR = 1e-300


class ETError(ValueError):
    pass


def _masses(mu):
    if isinstance(mu, DiscreteMeasure):
        keys = sorted(mu.atoms)
        return np.array([mu.atoms[k] for k in keys], dtype=float)
    return np.array(mu, dtype=float).ravel()


class ETProblem:
    """Immutable discrete entropy-transport instance.

    Parameters
    ----------
    F : Entropy
        Must be superlinear (``F'_inf = inf``) unless ``h_form_only``.
    cost : array_like, shape (m, n)
        Entries in ``[0, inf]``, not all infinite.
    mu1, mu2 : DiscreteMeasure or array_like
        Strictly positive masses.
    h_form_only : bool
        Accept a sublinear ``F``; only :func:`h_functional` is then usable.
    """

    def __init__(self, F, cost, mu1, mu2, h_form_only=False):
        cost = np.array(cost, dtype=float)
        r, t = _masses(mu1), _masses(mu2)
        if cost.ndim != 2 or cost.shape != (r.size, t.size):
            raise ETError(f"cost has shape {cost.shape}, masses give ({r.size}, {t.size})")
        if np.any(np.isnan(cost)) or np.any(cost < 0):
            raise ETError("costs must lie in [0, inf]")
        if np.all(np.isinf(cost)):
            raise ETError("cost is identically +inf")
        if np.any(~(r > 0)) or np.any(~(t > 0)) or np.any(~np.isfinite(r)) or np.any(~np.isfinite(t)):
            raise ETError("masses must be finite and strictly positive")
        if not h_form_only and math.isfinite(F.FprimeInf):
            raise ETError(f"{F.spec} is not superlinear; use h_form_only=True for the homogeneous form")
        self.F = F
        self.cost = cost
        self.r = r
        self.t = t
        self.h_form_only = h_form_only
        for a in (self.cost, self.r, self.t):
            a.setflags(write=False)

    @property
    def shape(self):
        return self.cost.shape

    @property
    def free(self):
        """Mask of plan entries with finite cost (the others stay 0)."""
        return np.isfinite(self.cost)

    def coercivity_bound(self):
        return COERCIVITY_FACTOR * (self.r.sum() + self.t.sum())

    def scaled(self, lam):
        return ETProblem(self.F, self.cost, lam * self.r, lam * self.t, self.h_form_only)

    # serialisation ------------------------------------------------------
    def to_dict(self):
        fam = self.F.family
        params = list(self.F.params) if fam != "tabulated" else [getattr(self.F, "source", "")]
        return {
            "schema": 1,
            "entropy": {"family": fam, "params": [_enc(p) for p in params]},
            "cost": [[_enc(x) for x in row] for row in self.cost],
            "mu1": self.r.tolist(),
            "mu2": self.t.tolist(),
        }

    @classmethod
    def from_dict(cls, data, h_form_only=False):
        ent = data["entropy"]
        F = make_entropy(ent["family"], [_dec(p) for p in ent.get("params", [])])
        cost = [[_dec(x) for x in row] for row in data["cost"]]
        mu1 = data["mu1"]
        mu2 = data["mu2"]
        if isinstance(mu1, dict):
            mu1 = DiscreteMeasure.from_dict(mu1)
        if isinstance(mu2, dict):
            mu2 = DiscreteMeasure.from_dict(mu2)
        return cls(F, cost, mu1, mu2, h_form_only=h_form_only)

    @classmethod
    def load(cls, path, h_form_only=False):
        with open(path) as fh:
            return cls.from_dict(json.load(fh), h_form_only=h_form_only)


def _enc(x):
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _dec(x):
    if isinstance(x, str):
        low = x.strip().lower()
        if low in ("inf", "+inf", "infinity"):
            return INF
        if low == "-inf":
            return -INF
        try:
            return float(low)
        except ValueError:
            return x
    return float(x)


def _check_plan(problem, plan):
    g = np.asarray(plan, dtype=float)
    if g.shape != problem.shape:
        raise ETError(f"plan has shape {g.shape}, expected {problem.shape}")
    if np.any(g < 0) or np.any(~np.isfinite(g)):
        raise ETError("plan entries must be finite and nonnegative")
    return g


# ----------------------------------------------------------------------
# functionals


def _energy_batch(F, cost, r, t, G):
    """``E`` for a stack of plans ``G`` of shape ``(N, m, n)``."""
    a = G.sum(axis=2)
    b = G.sum(axis=1)
    with np.errstate(invalid="ignore", over="ignore"):
        e1 = (r * F(a / r)).sum(axis=1)
        e2 = (t * F(b / t)).sum(axis=1)
        tc = np.where(G > 0, cost * G, 0.0).sum(axis=(1, 2))
    out = e1 + e2 + tc
    return np.where(np.isnan(out), INF, out)


def energy(problem, plan):
    """``E(gamma | mu1, mu2)``; ``+inf`` propagates.

    Examples
    --------
    >>> from fdivmetric.entropy import PowerLike
    >>> P = ETProblem(PowerLike(2.0), [[0.0, 1.0], [1.0, 0.0]], [1.0, 2.0], [1.0, 2.0])
    >>> energy(P, np.diag([1.0, 2.0])), energy(P, np.zeros((2, 2)))
    (0.0, 3.0)
    """
    if problem.h_form_only:
        raise ETError("the energy form needs a superlinear entropy")
    g = _check_plan(problem, plan)
    return float(_energy_batch(problem.F, problem.cost, problem.r, problem.t, g[None])[0])


def _h_batch(F, cost, r, t, G):
    """``H`` for a stack of plans; ``inf`` where a row or column sum vanishes."""
    a = G.sum(axis=2)
    b = G.sum(axis=1)
    ok = np.all(a > 0, axis=1) & np.all(b > 0, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ra = np.where(a > 0, r / a, 0.0)[:, :, None]
        tb = np.where(b > 0, t / b, 0.0)[:, None, :]
    Hc = h_cost_array(F, cost[None, :, :], ra, tb)
    with np.errstate(invalid="ignore"):
        terms = np.where(G > 0, Hc * G, 0.0)
    out = terms.sum(axis=(1, 2))
    out = np.where(np.isnan(out), INF, out)
    return np.where(ok, out, INF)


def h_functional(problem, plan):
    """Homogeneous functional ``H(mu1, mu2 | gamma)``.

    Requires every row and column of ``gamma`` to have positive sum.

    Examples
    --------
    >>> from fdivmetric.entropy import PowerLike
    >>> P = ETProblem(PowerLike(1.0), np.zeros((2, 2)), [1.0, 1.0], [1.0, 1.0])
    >>> h_functional(P, np.full((2, 2), 0.5))
    0.0
    """
    g = _check_plan(problem, plan)
    if np.any(g.sum(axis=1) <= 0) or np.any(g.sum(axis=0) <= 0):
        raise ETError("every row and column of the plan needs a positive sum")
    return float(_h_batch(problem.F, problem.cost, problem.r, problem.t, g[None])[0])


# ----------------------------------------------------------------------
# solver


@dataclass
class SolveReport:
    method: str
    iterations: int = 0
    converged: bool = False
    feasible: bool = True
    pg_norm: float = math.nan
    start_values: list = field(default_factory=list)
    eliminated: int = 0
    message: str = ""

    def to_dict(self):
        return {
            "schema": 1,
            "method": self.method,
            "iterations": self.iterations,
            "converged": self.converged,
            "feasible": self.feasible,
            "pg_norm": self.pg_norm,
            "start_values": self.start_values,
            "eliminated": self.eliminated,
            "message": self.message,
        }


def starting_plans(problem):
    """Diagonal-ish, product (total mass ``M_0``) and ``zero + eps`` plans."""
    m, n = problem.shape
    r, t = problem.r, problem.t
    free = problem.free
    eps = 1e-3 * min(r.min(), t.min())
    diag = np.full((m, n), eps)
    for k in range(min(m, n)):
        diag[k, k] = float(power_mean(0.0, r[k], t[k]))
    R, T = r.sum(), t.sum()
    prod = np.outer(r, t) * float(power_mean(0.0, R, T)) / (R * T)
    small = np.full((m, n), eps)
    return [np.where(free, g, 0.0) for g in (diag, prod, small)]


def _gradient(F, cost, r, t, g, free):
    a = g.sum(axis=1)
    b = g.sum(axis=0)
    da = F.derivative(np.maximum(a / r, S_FLOOR))
    db = F.derivative(np.maximum(b / t, S_FLOOR))
    grad = da[:, None] + db[None, :] + np.where(free, cost, 0.0)
    return np.where(free, grad, 0.0)


def _projected_gradient(problem, g0, tol, max_iters):
    """Projected gradient with Barzilai-Borwein trial steps and Armijo backtracking."""
    F, cost, r, t, free = problem.F, problem.cost, problem.r, problem.t, problem.free

    def E(g):
        return float(_energy_batch(F, cost, r, t, g[None])[0])

    g = g0.copy()
    f = E(g)
    if not math.isfinite(f):
        return g, f, 0, False, INF
    grad = _gradient(F, cost, r, t, g, free)
    step = 1.0 / max(1.0, float(np.max(np.abs(grad))))
    pg = INF
    it = 0
    for it in range(1, max_iters + 1):
        pg = float(np.linalg.norm(g - np.maximum(g - grad, 0.0)))
        if pg < tol:
            return g, f, it - 1, True, pg
        alpha = step
        while True:
            cand = np.where(free, np.maximum(g - alpha * grad, 0.0), 0.0)
            fc = E(cand)
            new_grad = _gradient(F, cost, r, t, cand, free)
            if abs(fc - f) <= 1e-14 * (1.0 + abs(f)):
                # energy differences are below rounding: judge the step by
                # the projected gradient instead
                pg_c = float(np.linalg.norm(cand - np.maximum(cand - new_grad, 0.0)))
                if pg_c < pg:
                    break
            elif fc <= f + 1e-4 * float(np.sum(grad * (cand - g))):
                break
            alpha *= 0.5
            if alpha < 1e-300:
                return g, f, it, False, pg
        s = cand - g
        y = new_grad - grad
        sy = float(np.sum(s * y))
        step = float(np.sum(s * s)) / sy if sy > 0 else 2.0 * alpha
        step = min(max(step, 1e-12), 1e12)
        g, f, grad = cand, fc, new_grad
    return g, f, it, False, pg


def _coordinate_golden(problem, g0, tol, max_sweeps):
    """Cyclic exact line searches along coordinates (convex in each)."""
    F, cost, r, t = problem.F, problem.cost, problem.r, problem.t
    B = problem.coercivity_bound()
    idx = list(zip(*np.nonzero(problem.free)))
    g = g0.copy()
    batch = g[None].copy()

    def E_at(i, j, x):
        batch[0] = g
        batch[0, i, j] = x
        return float(_energy_batch(F, cost, r, t, batch)[0])

    f = E_at(*idx[0], g[idx[0]])
    sweeps = 0
    converged = False
    for sweeps in range(1, max_sweeps + 1):
        moved = 0.0
        for i, j in idx:
            x, fx = scan_then_golden(lambda v: E_at(i, j, v), 0.0, B, n=64, tol=1e-14)
            if fx <= f:
                moved = max(moved, abs(x - g[i, j]))
                g[i, j] = x
                f = fx
        if moved < tol:
            converged = True
            break
    return g, f, sweeps, converged


def solve(problem, tol=TOL_SOLVE, max_iters=MAX_ITERS, method="auto"):
    """Minimise ``E`` over plans.

    Parameters
    ----------
    method : {'auto', 'gradient', 'coordinate'}
        ``auto`` picks projected gradient for smooth families and
        coordinate-wise golden section for kinked ones.

    Returns
    -------
    plan : ndarray
    value : float
    report : SolveReport
        ``feasible`` is False when every start sits on the ``+inf``
        plateau and coordinate search finds no finite plan.

    Examples
    --------
    >>> from fdivmetric.entropy import PowerLike
    >>> P = ETProblem(PowerLike(1.0), [[0.0, "inf"], ["inf", 0.0]], [1.0, 1.0], [4.0, 1.0])
    >>> _, v, rep = solve(P)
    >>> round(v, 9), rep.converged
    (1.0, True)
    """
    if problem.h_form_only:
        raise ETError("solve minimises the energy form and needs a superlinear entropy")
    if method == "auto":
        method = "gradient" if getattr(problem.F, "smooth", False) else "coordinate"
    if method not in ("gradient", "coordinate"):
        raise ValueError(f"unknown method {method!r}")
    if method == "gradient" and not getattr(problem.F, "smooth", False):
        raise ValueError(f"{problem.F.spec} has no closed-form derivative; use method='coordinate'")
    report = SolveReport(method=method, eliminated=int(np.sum(~problem.free)))
    best = (None, INF, 0, False, INF)
    for g0 in starting_plans(problem):
        if method == "gradient":
            res = _projected_gradient(problem, g0, tol, max_iters)
        else:
            g, f, it, conv = _coordinate_golden(problem, g0, tol, max_sweeps=max(1, max_iters // 100))
            res = (g, f, it, conv, math.nan)
        report.start_values.append(res[1])
        if best[0] is None or res[1] < best[1]:
            best = res
    g, f, it, conv, pg = best
    if not math.isfinite(f) and method == "gradient":
        # every start infinite: coordinate search may still reach the domain
        g, f, it, conv = _coordinate_golden(problem, starting_plans(problem)[0], tol, 100)
        report.method = "coordinate"
    report.iterations, report.converged, report.pg_norm = it, conv, pg
    if not math.isfinite(f):
        report.feasible = False
        report.converged = False
        report.message = "descent is infeasible: every reachable plan has infinite energy"
    return g, f, report


def solution_dict(plan, value, report):
    return {
        "schema": 1,
        "value": _enc(value),
        "plan": np.asarray(plan, dtype=float).tolist(),
        "iterations": report.iterations,
        "converged": report.converged,
        "feasible": report.feasible,
        "method": report.method,
    }


# ----------------------------------------------------------------------
# brute force


@dataclass
class BruteForceResult:
    """Grid minima of ``E`` and ``H`` with their resolution bounds.

    ``energy_resolution`` (``h_resolution``) is the largest change of the
    functional between the best grid plan and its grid neighbours at the
    coarse level: a minimum located on that grid is within this amount of
    the true grid-restricted infimum.
    """

    energy_min: float
    h_min: float
    energy_plan: np.ndarray
    h_plan: np.ndarray
    energy_resolution: float
    h_resolution: float
    energy_coarse: float
    h_coarse: float

    @property
    def resolution(self):
        return max(self.energy_resolution, self.h_resolution)

    def to_dict(self):
        return {
            "schema": 1,
            "energy_min": _enc(self.energy_min),
            "h_min": _enc(self.h_min),
            "energy_coarse": _enc(self.energy_coarse),
            "h_coarse": _enc(self.h_coarse),
            "resolution": self.resolution,
        }


def _grid_min(fn, problem, centre, half, k, chunk=200_000):
    """Minimise ``fn`` over a tensor grid of ``k`` points per free entry."""
    free_idx = list(zip(*np.nonzero(problem.free)))
    m, n = problem.shape
    axes = [np.linspace(max(0.0, centre[ij] - half), centre[ij] + half, k) for ij in free_idx]
    total = k ** len(free_idx)
    best_val, best_flat, best_plan = INF, 0, np.zeros((m, n))
    flat_iter = itertools.product(*axes)
    start = 0
    while start < total:
        block = list(itertools.islice(flat_iter, chunk))
        if not block:
            break
        vals = np.array(block)
        G = np.zeros((len(block), m, n))
        for col, (i, j) in enumerate(free_idx):
            G[:, i, j] = vals[:, col]
        out = fn(problem.F, problem.cost, problem.r, problem.t, G)
        kk = int(np.argmin(out))
        if out[kk] < best_val:
            best_val, best_flat, best_plan = float(out[kk]), start + kk, G[kk].copy()
        start += len(block)
    return best_val, best_plan, axes, best_flat


def _neighbour_spread(fn, problem, plan, axes, flat):
    """Largest change of ``fn`` between ``plan`` and its grid neighbours."""
    free_idx = list(zip(*np.nonzero(problem.free)))
    k = len(axes[0])
    digits = np.unravel_index(flat, (k,) * len(axes))
    G = []
    for col, (i, j) in enumerate(free_idx):
        for dlt in (-1, 1):
            d = digits[col] + dlt
            if 0 <= d < k:
                g = plan.copy()
                g[i, j] = axes[col][d]
                G.append(g)
    if not G:
        return 0.0
    base = float(fn(problem.F, problem.cost, problem.r, problem.t, plan[None])[0])
    vals = fn(problem.F, problem.cost, problem.r, problem.t, np.array(G))
    diffs = np.abs(vals[np.isfinite(vals)] - base)
    return float(diffs.max()) if diffs.size else INF


def _zoom(fn, problem, k):
    B = problem.coercivity_bound()
    centre = np.zeros(problem.shape)
    half = B
    coarse, plan, axes, flat = _grid_min(fn, problem, centre, half, k)
    res = _neighbour_spread(fn, problem, plan, axes, flat) if math.isfinite(coarse) else INF
    val = coarse
    step = B / (k - 1)
    for _ in range(ZOOM_ROUNDS):
        if not math.isfinite(val):
            break
        half = 2.0 * step
        v, p, _, _ = _grid_min(fn, problem, plan, half, ZOOM_POINTS)
        if v <= val:
            val, plan = v, p
        step = 2.0 * half / (ZOOM_POINTS - 1) * 0.5
    return val, plan, res, coarse


def brute_force_et(problem, grid_per_entry=GRID_PER_ENTRY, forms=("energy", "h")):
    """Grid minima of ``E`` and of ``H`` (separately), with zoom refinement.

    The coarse grid spans ``[0, B]`` per free entry with
    ``B = 3 (mass(mu1) + mass(mu2))``; the best plan is then refined by
    repeatedly re-gridding a shrinking box around it.

    Parameters
    ----------
    forms : iterable of {'energy', 'h'}
        Functionals to minimise; a skipped one is reported as ``inf``.
        ``H`` is fast only for ``U_p`` (closed-form cost); other families
        evaluate the cost numerically at every grid plan.

    Returns
    -------
    BruteForceResult
    """
    n_free = int(np.sum(problem.free))
    if problem.cost.size > MAX_BRUTE_ENTRIES:
        raise ETError(f"brute force needs m*n <= {MAX_BRUTE_ENTRIES}")
    if n_free == 0:
        raise ETError("no finite-cost entries")
    forms = set(forms)
    if not forms or not forms <= {"energy", "h"}:
        raise ValueError(f"forms must be a nonempty subset of ('energy', 'h'), got {sorted(forms)}")
    skipped = (INF, np.zeros(problem.shape), INF, INF)
    if problem.h_form_only or "energy" not in forms:
        e_val, e_plan, e_res, e_coarse = skipped
    else:
        e_val, e_plan, e_res, e_coarse = _zoom(_energy_batch, problem, grid_per_entry)
    if "h" in forms:
        h_val, h_plan, h_res, h_coarse = _zoom(_h_batch, problem, grid_per_entry)
    else:
        h_val, h_plan, h_res, h_coarse = skipped
    return BruteForceResult(e_val, h_val, e_plan, h_plan, e_res, h_res, e_coarse, h_coarse)


# ----------------------------------------------------------------------
# pure-entropy recovery


def blocking_cost_problem(F, r, t):
    """Diagonal zero cost, ``+inf`` off the diagonal: no mass can move."""
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    if r.shape != t.shape:
        raise ETError("blocking instance needs masses on the same points")
    cost = np.full((r.size, r.size), INF)
    np.fill_diagonal(cost, 0.0)
    return ETProblem(F, cost, r, t)


def pure_entropy_value(F, r, t):
    """``sum_i f(r_i / t_i) t_i`` with ``f(s) = H_F(s, 1)`` (equals ``sum_i H_F(r_i, t_i)``)."""
    H = MarginalPerspective(F)
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    return float(np.sum(np.asarray(H(r / t, np.ones_like(t)), dtype=float) * t))


def h_form_invariance(problem, diagonals):
    """``H`` at diagonal plans ``diag(g)`` for each ``g`` in ``diagonals``.

    On a blocking instance every positive diagonal gives the same value.
    """
    return [h_functional(problem, np.diag(np.asarray(g, dtype=float))) for g in diagonals]
