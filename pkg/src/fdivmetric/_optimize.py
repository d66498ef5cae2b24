"""Scalar search primitives shared by the oracles.

Everything here works on plain Python floats; objectives may return
``math.inf``.
"""

import math

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo, hi, tol=1e-12, maxiter=300):
    """Minimise a unimodal function on ``[lo, hi]``.

    The endpoints are evaluated as well, so minimisers sitting exactly on
    the boundary are returned exactly.

    Parameters
    ----------
    f : callable
        Objective; ``inf`` is allowed.
    lo, hi : float
        Bracket, ``lo <= hi``.
    tol : float
        Stop when the bracket width drops below ``tol * max(1, |lo|, |hi|)``.

    Returns
    -------
    x, fx : float
    """
    if hi < lo:
        lo, hi = hi, lo
    f_lo, f_hi = f(lo), f(hi)
    if hi == lo:
        return lo, f_lo
    a, b = lo, hi
    x1 = b - INVPHI * (b - a)
    x2 = a + INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    scale = max(1.0, abs(lo), abs(hi))
    for _ in range(maxiter):
        if b - a <= tol * scale:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INVPHI * (b - a)
            f2 = f(x2)
    best = min((f1, x1), (f2, x2), (f_lo, lo), (f_hi, hi), key=lambda p: p[0])
    return best[1], best[0]


def scan_then_golden(f, lo, hi, n=64, tol=1e-12):
    """Coarse scan over ``n`` equispaced points, then golden refinement.

    Guards against objectives that are only approximately unimodal.
    """
    if hi <= lo:
        return lo, f(lo)
    step = (hi - lo) / (n - 1)
    xs = [lo + k * step for k in range(n)]
    xs[-1] = hi
    vals = [f(x) for x in xs]
    k = min(range(n), key=vals.__getitem__)
    a = xs[max(k - 1, 0)]
    b = xs[min(k + 1, n - 1)]
    x, fx = golden_section(f, a, b, tol=tol)
    if vals[k] < fx:
        return xs[k], vals[k]
    return x, fx


def bisect_increasing(g, y, lo, hi, tol=1e-14, maxiter=400):
    """Solve ``g(x) = y`` for increasing ``g`` on a finite bracket."""
    glo, ghi = g(lo), g(hi)
    if not (glo <= y <= ghi):
        raise ValueError(f"target {y!r} not bracketed by [{glo!r}, {ghi!r}]")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        gm = g(mid)
        if gm < y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)


def _aitken(x0, x1, x2):
    denom = (x2 - x1) - (x1 - x0)
    if denom == 0.0:
        return None
    return x2 - (x2 - x1) ** 2 / denom


def boundary_limit(fn, k_range=(10, 40), rtol=1e-9):
    """Limit of ``fn(eps)`` as ``eps`` decreases along ``2**-k``.

    Aitken's delta-squared extrapolation is applied to the tail (the error of
    l.s.c. envelopes typically decays like a power of ``eps``, i.e.
    geometrically in ``k``) and accepted once two successive estimates agree
    to ``rtol``; raw values are accepted directly when they agree to
    ``rtol * 1e-3``.  Sequences whose increments stop shrinking are
    reported as divergent (``inf``).
    """
    vals = []
    acc = []
    for k in range(k_range[0], k_range[1] + 1):
        v = fn(2.0 ** -k)
        if math.isinf(v):
            return math.inf
        vals.append(v)
        if len(vals) >= 6:
            d = [b - a for a, b in zip(vals[-6:-1], vals[-5:])]
            # increments positive and not contracting: log- or power-type blow up
            if all(x > 0 for x in d) and all(d[i + 1] >= 0.95 * d[i] for i in range(4)):
                return math.inf
        if len(vals) >= 2:
            a, b = vals[-2], vals[-1]
            if abs(b - a) <= 1e-3 * rtol * max(1.0, abs(b)):
                return b
        if len(vals) >= 3:
            e = _aitken(*vals[-3:])
            if e is not None:
                acc.append(e)
                if len(acc) >= 2 and abs(acc[-1] - acc[-2]) <= rtol * max(1.0, abs(acc[-1])):
                    return acc[-1]
    if len(vals) >= 4:
        d1 = vals[-2] - vals[-3]
        d2 = vals[-1] - vals[-2]
        # increments not contracting: log-type or power-type blow up
        if d2 > 0 and d1 > 0 and d2 / d1 > 0.9:
            return math.inf
    return acc[-1] if acc else vals[-1]
