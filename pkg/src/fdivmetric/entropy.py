"""Admissible entropy functions and the calculus built on them.

An admissible entropy is a convex, lower semicontinuous ``F: [0, inf) ->
[0, inf]`` with ``F(1) = 0``.  Every family below precomputes its coefficient
pack at construction:

``F0``
    the value ``F(0)``;
``Fprime0``
    right derivative at 0 (``-inf`` when ``F(0) = inf``);
``FprimeInf``
    recession constant, the slope of ``F`` at infinity;
``affInf``
    asymptotic affine coefficient ``lim FprimeInf * s - F(s)``.

Values are plain floats with ``math.inf`` standing for ``+inf``; the
``0 * inf = 0`` convention is applied explicitly wherever a product with a
possibly infinite factor appears.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._numeric import INF, interp_extended, xmul
from ._optimize import bisect_increasing, golden_section

TOL_LIMIT = 1e-8
TOL_CONVEXITY = 1e-10


class EntropyParameterError(ValueError):
    """Raised when family parameters fall outside the admissible range."""


class SpaceMismatchError(ValueError):
    """Raised when two measures live on different point sets."""


def _as_array(s):
    arr = np.asarray(s, dtype=float)
    return arr, arr.ndim == 0


class Entropy:
    """Common interface of all entropy families.

    Subclasses implement ``_eval`` (vectorised, numpy) and ``_scalar``
    (plain float, used inside scalar search loops) and set the coefficient
    pack in ``_coefficients``.
    """

    family = "abstract"
    #: whether a classical derivative is available away from 0
    smooth = False

    def __call__(self, s):
        arr, scalar = _as_array(s)
        if np.any(arr < 0):
            raise ValueError("entropy evaluated at a negative argument")
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.asarray(self._eval(arr), dtype=float)
        return float(out) if scalar else out

    def value(self, s):
        """Scalar evaluation (fast path)."""
        return self._scalar(float(s))

    def _scalar(self, s):
        return float(self(s))

    # coefficient pack -------------------------------------------------
    def __post_init__(self):
        self._validate()
        F0, Fp0, FpInf, aff = self._coefficients()
        object.__setattr__(self, "F0", float(F0))
        object.__setattr__(self, "Fprime0", float(Fp0))
        object.__setattr__(self, "FprimeInf", float(FpInf))
        object.__setattr__(self, "affInf", float(aff))
        lo, hi = self._domain()
        object.__setattr__(self, "dom_lo", float(lo))
        object.__setattr__(self, "dom_hi", float(hi))

    def _validate(self):
        pass

    def _domain(self):
        return 0.0, INF

    @property
    def coefficients(self):
        return {
            "F0": self.F0,
            "Fprime0": self.Fprime0,
            "FprimeInf": self.FprimeInf,
            "affInf": self.affInf,
        }

    @property
    def strict_min(self):
        """``F(s) = 0`` only at ``s = 1``."""
        return True

    @property
    def params(self):
        return ()

    @property
    def spec(self):
        """Mini-grammar token, e.g. ``powerlike:2``."""
        if not self.params:
            return self.family
        return self.family + ":" + ",".join(repr(float(p)) for p in self.params)

    def derivative(self, s):
        """Derivative on ``(0, inf)``; only defined for smooth families."""
        raise NotImplementedError(f"{self.family} has no closed-form derivative")

    def reverse(self):
        return Reversed(self)

    def conjugate(self, phi):
        """Legendre conjugate ``sup_{s >= 0} s*phi - F(s)``."""
        return _conjugate_numeric(self, float(phi))

    def __repr__(self):
        return f"<Entropy {self.spec}>"


# ----------------------------------------------------------------------
# families


@dataclass(frozen=True, repr=False)
class Indicator(Entropy):
    """Indicator of ``[a, b]`` with ``0 <= a <= 1 <= b <= inf``."""

    a: float = 1.0
    b: float = 1.0
    family = "indicator"

    def _validate(self):
        if not (0.0 <= self.a <= 1.0 <= self.b):
            raise EntropyParameterError("indicator needs 0 <= a <= 1 <= b <= inf")

    def _eval(self, s):
        return np.where((s >= self.a) & (s <= self.b), 0.0, INF)

    def _scalar(self, s):
        return 0.0 if self.a <= s <= self.b else INF

    def _coefficients(self):
        F0 = 0.0 if self.a == 0.0 else INF
        Fp0 = 0.0 if self.a == 0.0 else -INF
        if math.isinf(self.b):
            # F is 0 on [a, inf): slope 0 and aff = lim 0*s - 0 = 0
            return F0, Fp0, 0.0, 0.0
        return F0, Fp0, INF, INF

    def _domain(self):
        return self.a, self.b

    @property
    def strict_min(self):
        return self.a == 1.0 and self.b == 1.0

    @property
    def params(self):
        return (self.a, self.b)

    def reverse(self):
        lo = 0.0 if math.isinf(self.b) else 1.0 / self.b
        hi = INF if self.a == 0.0 else 1.0 / self.a
        return Indicator(lo, hi)

    def conjugate(self, phi):
        phi = float(phi)
        if phi > 0:
            return INF if math.isinf(self.b) else self.b * phi
        if phi < 0:
            return self.a * phi
        return 0.0


@dataclass(frozen=True, repr=False)
class ChiAlpha(Entropy):
    """``|s - 1| ** alpha``, alpha >= 1 (alpha = 1 is total variation)."""

    alpha: float = 2.0
    family = "chi"

    def _validate(self):
        if not self.alpha >= 1.0:
            raise EntropyParameterError("chi^alpha needs alpha >= 1")

    def _eval(self, s):
        return np.abs(s - 1.0) ** self.alpha

    def _scalar(self, s):
        return abs(s - 1.0) ** self.alpha

    def _coefficients(self):
        if self.alpha == 1.0:
            return 1.0, -1.0, 1.0, 1.0
        return 1.0, -self.alpha, INF, INF

    @property
    def params(self):
        return (self.alpha,)

    def reverse(self):
        if self.alpha == 1.0:
            return self
        return Reversed(self)

    def conjugate(self, phi):
        phi = float(phi)
        al = self.alpha
        if al == 1.0:
            return INF if phi > 1.0 else max(phi, -1.0)
        if phi <= -al:
            return -1.0
        beta = al / (al - 1.0)
        return phi + (al - 1.0) * (abs(phi) / al) ** beta


@dataclass(frozen=True, repr=False)
class TotalVariationScaled(Entropy):
    """``c * |s - 1|`` with ``c > 0``."""

    c: float = 1.0
    family = "tv"

    def _validate(self):
        if not self.c > 0:
            raise EntropyParameterError("scaled total variation needs c > 0")

    def _eval(self, s):
        return self.c * np.abs(s - 1.0)

    def _scalar(self, s):
        return self.c * abs(s - 1.0)

    def _coefficients(self):
        return self.c, -self.c, self.c, self.c

    @property
    def params(self):
        return (self.c,)

    def reverse(self):
        return self

    def conjugate(self, phi):
        phi = float(phi)
        if phi > self.c:
            return INF
        return max(phi, -self.c)


@dataclass(frozen=True, repr=False)
class Matusita(Entropy):
    """``|s**a - 1| ** (1/a)``, ``0 < a <= 1``."""

    a: float = 0.5
    family = "matusita"

    def _validate(self):
        if not (0.0 < self.a <= 1.0):
            raise EntropyParameterError("Matusita needs 0 < a <= 1")

    def _eval(self, s):
        return np.abs(s ** self.a - 1.0) ** (1.0 / self.a)

    def _scalar(self, s):
        return abs(s ** self.a - 1.0) ** (1.0 / self.a)

    def _coefficients(self):
        if self.a == 1.0:
            return 1.0, -1.0, 1.0, 1.0
        return 1.0, -INF, 1.0, INF

    @property
    def params(self):
        return (self.a,)

    def reverse(self):
        # s * M_a(1/s) = M_a(s)
        return self


@dataclass(frozen=True, repr=False)
class PowerLike(Entropy):
    """Power-like entropy ``U_p``: ``U_p'' = s**(p-2)``, ``U_p(1) = U_p'(1) = 0``."""

    p: float = 1.0
    family = "powerlike"
    smooth = True

    def _eval(self, s):
        p = self.p
        if p == 1.0:
            safe = np.where(s > 0, s, 1.0)
            return np.where(s > 0, s * np.log(safe) - s + 1.0, 1.0)
        if p == 0.0:
            return s - 1.0 - np.log(s)
        return (s ** p - p * (s - 1.0) - 1.0) / (p * (p - 1.0))

    def _scalar(self, s):
        p = self.p
        if p == 1.0:
            return s * math.log(s) - s + 1.0 if s > 0 else 1.0
        if s == 0.0:
            return 1.0 / p if p > 0 else INF
        if p == 0.0:
            return s - 1.0 - math.log(s)
        return (s ** p - p * (s - 1.0) - 1.0) / (p * (p - 1.0))

    def _coefficients(self):
        p = self.p
        F0 = 1.0 / p if p > 0 else INF
        Fp0 = -1.0 / (p - 1.0) if p > 1 else -INF
        if p >= 1:
            return F0, Fp0, INF, INF
        FpInf = 1.0 / (1.0 - p)
        aff = -1.0 / p if p < 0 else INF
        return F0, Fp0, FpInf, aff

    @property
    def params(self):
        return (self.p,)

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        p = self.p
        with np.errstate(divide="ignore"):
            if p == 1.0:
                return np.log(s)
            return (s ** (p - 1.0) - 1.0) / (p - 1.0)

    def reverse(self):
        return PowerLike(1.0 - self.p)

    def conjugate(self, phi):
        phi = float(phi)
        p = self.p
        if p == 1.0:
            try:
                return math.expm1(phi)
            except OverflowError:
                return INF
        if p == 0.0:
            return -math.log1p(-phi) if phi < 1.0 else INF
        base = 1.0 + (p - 1.0) * phi
        if p > 1:
            if base <= 0:
                return -1.0 / p
        else:
            if base < 0 or (base == 0 and p > 0):
                return INF
            if base == 0:
                return -1.0 / p
        try:
            return (base ** (p / (p - 1.0)) - 1.0) / p
        except OverflowError:
            return INF

    def _conjugate_inverse(self, y):
        p = self.p
        if p == 1.0:
            return math.log1p(y)
        if p == 0.0:
            return -math.expm1(-y)
        return ((1.0 + p * y) ** ((p - 1.0) / p) - 1.0) / (p - 1.0)


@dataclass(frozen=True, repr=False)
class PowerLog(Entropy):
    """``s**p - p*ln(s) - 1`` for ``p >= 1``; ``+inf`` at 0."""

    p: float = 2.0
    family = "powerlog"
    smooth = True

    def _validate(self):
        if not self.p >= 1.0:
            raise EntropyParameterError("power-logarithmic entropy needs p >= 1")

    def _eval(self, s):
        return s ** self.p - self.p * np.log(s) - 1.0

    def _scalar(self, s):
        if s == 0.0:
            return INF
        return s ** self.p - self.p * math.log(s) - 1.0

    def _coefficients(self):
        if self.p == 1.0:
            return INF, -INF, 1.0, INF
        return INF, -INF, INF, INF

    @property
    def params(self):
        return (self.p,)

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            return self.p * (s ** (self.p - 1.0) - 1.0 / s)


@dataclass(frozen=True, repr=False)
class DoublePower(Entropy):
    """``q*s**p - p*s**q + p - q``.

    Admissible for ``p >= 1, 0 < q <= 1, p != q`` or ``p < 0, q >= 1``.
    """

    p: float = 1.5
    q: float = 0.5
    family = "doublepower"
    smooth = True

    def _validate(self):
        p, q = self.p, self.q
        ok = (p >= 1 and 0 < q <= 1 and p != q) or (p < 0 and q >= 1)
        if not ok:
            raise EntropyParameterError(
                "double power entropy needs (p >= 1, 0 < q <= 1, p != q) or (p < 0, q >= 1)"
            )

    def _eval(self, s):
        p, q = self.p, self.q
        return q * s ** p - p * s ** q + p - q

    def _scalar(self, s):
        p, q = self.p, self.q
        if s == 0.0:
            return INF if p < 0 else p - q
        return q * s ** p - p * s ** q + p - q

    def _coefficients(self):
        p, q = self.p, self.q
        if p < 0:
            if q == 1.0:
                return INF, -INF, -p, 1.0 - p
            return INF, -INF, INF, INF
        F0 = p - q
        Fp0 = -p if q == 1.0 else -INF
        if p == 1.0:
            return F0, Fp0, q, INF
        return F0, Fp0, INF, INF

    @property
    def params(self):
        return (self.p, self.q)

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        p, q = self.p, self.q
        with np.errstate(divide="ignore"):
            return p * q * (s ** (p - 1.0) - s ** (q - 1.0))


@dataclass(frozen=True, repr=False)
class Tabulated(Entropy):
    """Convex piecewise-linear entropy from sampled ``(s, F(s))`` pairs.

    Right of the last node the last finite slope is continued; left of the
    first node the function is ``+inf``.  Coefficients are obtained by
    numerical limits.
    """

    s_nodes: tuple = (0.0, 1.0, 2.0)
    values: tuple = (1.0, 0.0, 1.0)
    source: str = field(default="", compare=False)
    family = "tab"

    def _validate(self):
        s = np.asarray(self.s_nodes, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if s.shape != v.shape or s.ndim != 1 or len(s) < 2:
            raise EntropyParameterError("tabulated entropy needs >= 2 matching nodes")
        if np.any(np.diff(s) <= 0) or s[0] < 0:
            raise EntropyParameterError("tabulated nodes must be nonnegative and strictly increasing")
        if np.any(v < 0):
            raise EntropyParameterError("tabulated values must be nonnegative")
        one = float(interp_extended(1.0, s, v))
        if one != 0.0:
            raise EntropyParameterError("tabulated entropy must vanish at s = 1")
        fin = np.isfinite(v)
        idx = np.flatnonzero(fin)
        if not np.all(fin[idx[0]: idx[-1] + 1]):
            raise EntropyParameterError("tabulated entropy has an interior +inf (not convex)")
        if len(idx) >= 3:
            ss, vv = s[idx], v[idx]
            slopes = np.diff(vv) / np.diff(ss)
            if np.any(np.diff(slopes) < -TOL_CONVEXITY * (1 + np.abs(slopes[1:]))):
                raise EntropyParameterError("tabulated entropy is not convex")

    def _eval(self, s):
        return interp_extended(s, self.s_nodes, self.values, extrapolate_slope=True)

    def _coefficients(self):
        return numeric_coefficients(self)

    def _domain(self):
        v = np.asarray(self.values, dtype=float)
        s = np.asarray(self.s_nodes, dtype=float)
        idx = np.flatnonzero(np.isfinite(v))
        hi = INF if idx[-1] == len(v) - 1 else s[idx[-1]]
        return s[idx[0]], hi

    @property
    def strict_min(self):
        s = np.asarray(self.s_nodes, dtype=float)
        v = np.asarray(self.values, dtype=float)
        return int(np.sum(v == 0.0)) == 1 and bool(np.any(s == 1.0))

    @property
    def spec(self):
        return "tab:" + (self.source or "<memory>")


@dataclass(frozen=True, repr=False)
class Reversed(Entropy):
    """Reverse entropy ``R(s) = s * F(1/s)``, ``R(0) = F'_inf``."""

    inner: Entropy = None
    family = "reverse"

    def _eval(self, s):
        inner = self.inner
        pos = s > 0
        out = np.full(s.shape, inner.FprimeInf)
        sp = s[pos]
        vals = np.asarray(inner(1.0 / sp), dtype=float)
        with np.errstate(invalid="ignore"):
            out[pos] = sp * vals
        return out

    def _scalar(self, s):
        if s == 0.0:
            return self.inner.FprimeInf
        return xmul(s, self.inner.value(1.0 / s))

    def _coefficients(self):
        F = self.inner
        # R(0) = F'_inf, R'_inf = F(0), R'_0 = -aff F_inf, aff R_inf = -F'_0
        return F.FprimeInf, -F.affInf, F.F0, -F.Fprime0

    def _domain(self):
        lo = 0.0 if math.isinf(self.inner.dom_hi) else 1.0 / self.inner.dom_hi
        hi = INF if self.inner.dom_lo == 0.0 else 1.0 / self.inner.dom_lo
        return lo, hi

    @property
    def strict_min(self):
        return self.inner.strict_min

    @property
    def spec(self):
        return "reverse(" + self.inner.spec + ")"

    def reverse(self):
        return self.inner


# ----------------------------------------------------------------------
# numerical limits and conjugates


def _limit_doubling(seq, tol=TOL_LIMIT, kmax=200):
    """Limit of ``seq(k)`` as ``k`` grows, with Aitken acceleration.

    Errors of the chord/ratio sequences used here decay geometrically in
    ``k``, which is exactly what the delta-squared step removes.
    """
    vals = []
    acc = []
    for k in range(1, kmax):
        v = seq(k)
        if math.isinf(v):
            return v
        vals.append(v)
        if len(vals) >= 2 and v == vals[-2]:
            return v
        if len(vals) >= 5:
            d = np.diff(vals[-5:])
            if np.all(d > 0) or np.all(d < 0):
                ratios = d[1:] / d[:-1]
                # increments not contracting: the sequence diverges.  The
                # ratios are extrapolated first, so that a pre-asymptotic
                # growth phase of a slowly converging tail is not mistaken
                # for divergence.
                q0, q1, q2 = ratios[-3:]
                den = (q2 - q1) - (q1 - q0)
                q_lim = q2 if den == 0 else q2 - (q2 - q1) ** 2 / den
                if np.all(ratios >= 0.95) and min(q_lim, q2) >= 0.97:
                    return math.copysign(INF, d[-1])
        if len(vals) >= 3:
            x0, x1, x2 = vals[-3:]
            denom = (x2 - x1) - (x1 - x0)
            acc.append(x2 if denom == 0 else x2 - (x2 - x1) ** 2 / denom)
            if (
                len(vals) >= 5
                and len(acc) >= 2
                and abs(acc[-1] - acc[-2]) <= tol * max(abs(acc[-1]), 1e-12)
            ):
                return acc[-1]
    return acc[-1] if acc else vals[-1]


def numeric_coefficients(F):
    """Coefficient pack of ``F`` from numerical limits (relative ``TOL_LIMIT``)."""
    F0 = F.value(0.0)
    FpInf = _limit_doubling(lambda k: F.value(1.0 + 2.0 ** k) / 2.0 ** k)
    if math.isinf(F0):
        Fp0 = -INF
    else:
        Fp0 = _limit_doubling(lambda k: (F.value(2.0 ** -k) - F0) / 2.0 ** -k)
    if math.isinf(FpInf):
        aff = INF
    else:
        # intercept of the chord over [s, 2s] tends to aff F_inf
        def chord(k):
            s = 2.0 ** k
            f1, f2 = F.value(s), F.value(2.0 * s)
            return (f2 - f1) - f1
        aff = _limit_doubling(chord)
    return F0, Fp0, FpInf, aff


def _conjugate_numeric(F, phi, tol=1e-12):
    if phi > F.FprimeInf:
        return INF
    if phi == F.FprimeInf:
        return F.affInf
    if phi == 0.0:
        return 0.0
    if phi <= F.Fprime0:
        return -F.F0

    def neg(s):
        return -(s * phi) + F.value(s) if s >= 0 else INF

    # phi in (F'_0, F'_inf): maximiser is finite; expand until the concave
    # objective s*phi - F(s) turns down
    lo = max(F.dom_lo, 0.0)
    hi = max(2.0, 2.0 * lo)
    if math.isfinite(F.dom_hi):
        hi = F.dom_hi
    else:
        while neg(hi) < neg(0.5 * hi + 0.5 * lo) and hi < 1e300:
            hi *= 2.0
    _, val = golden_section(neg, lo, hi, tol=tol)
    return -val


# ----------------------------------------------------------------------
# public operations


def evaluate(F, s):
    """``F(s)`` for ``s >= 0`` (lower semicontinuous value at 0)."""
    return F(s)


def recession(F, r):
    """Recession function ``rec(F)(r) = F'_inf * r`` with ``0 * inf = 0``."""
    if r < 0:
        raise ValueError("recession needs r >= 0")
    return xmul(F.FprimeInf, float(r))


def perspective(F, r, t):
    """Perspective ``F(r/t) * t``; ``rec(F)(r)`` at ``t = 0``."""
    r = float(r)
    t = float(t)
    if r < 0 or t < 0:
        raise ValueError("perspective needs r, t >= 0")
    if t == 0.0:
        return recession(F, r)
    return xmul(F.value(r / t), t)


def perspective_array(F, r, t):
    """Vectorised :func:`perspective`."""
    r, t = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(t, dtype=float))
    out = np.empty(r.shape)
    pos = t > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.asarray(F(r[pos] / t[pos]), dtype=float)
        prod = vals * t[pos]
    out[pos] = np.where(vals == 0.0, 0.0, prod)
    rz = r[~pos]
    with np.errstate(invalid="ignore"):
        out[~pos] = np.where(rz == 0.0, 0.0, F.FprimeInf * rz)
    return out


def reverse(F):
    """Reverse entropy; ``reverse(reverse(F))`` evaluates like ``F``."""
    return F.reverse()


def conjugate(F, phi):
    return F.conjugate(phi)


def conjugate_range(F):
    """Open interval ``(-F(0), aff F_inf)`` on which ``F*`` is invertible."""
    return -F.F0, F.affInf


def conjugate_inverse(F, y, tol_root=1e-15):
    """The unique ``phi`` in ``(F'_0, F'_inf)`` with ``F*(phi) = y``.

    Bisection on the increasing map ``F*`` after bracketing.

    Raises
    ------
    ValueError
        If ``y`` lies outside ``(-F(0), aff F_inf)``.
    """
    y = float(y)
    lo_y, hi_y = conjugate_range(F)
    if not (lo_y < y < hi_y):
        raise ValueError(f"y={y!r} outside the conjugate range ({lo_y!r}, {hi_y!r})")
    if y == 0.0:
        return 0.0
    closed = getattr(F, "_conjugate_inverse", None)
    if closed is not None:
        return closed(y)
    lo, hi = F.Fprime0, F.FprimeInf
    if y > 0:
        lo = 0.0
        if math.isinf(hi):
            hi = 1.0
            while F.conjugate(hi) < y:
                hi *= 2.0
    else:
        hi = 0.0
        if math.isinf(lo):
            lo = -1.0
            while F.conjugate(lo) > y:
                lo *= 2.0
    return bisect_increasing(F.conjugate, y, lo, hi, tol=tol_root)


# ----------------------------------------------------------------------
# measures and divergences


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite nonnegative measure: ``{point_index: mass}`` on a named point set."""

    space_id: str
    atoms: dict

    def __post_init__(self):
        atoms = {int(k): float(v) for k, v in dict(self.atoms).items()}
        for k, v in atoms.items():
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError(f"mass at {k} must be finite and nonnegative")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_masses(cls, masses, space_id="default"):
        return cls(space_id, {i: m for i, m in enumerate(masses)})

    @property
    def total_mass(self):
        return sum(self.atoms.values())

    def mass(self, i):
        return self.atoms.get(i, 0.0)

    def to_dict(self):
        return {
            "schema": 1,
            "space_id": self.space_id,
            "atoms": [[i, m] for i, m in sorted(self.atoms.items())],
        }

    @classmethod
    def from_dict(cls, data):
        atoms = data["atoms"]
        if isinstance(atoms, dict):
            pairs = atoms.items()
        elif atoms and isinstance(atoms[0], (list, tuple)):
            pairs = atoms
        else:
            pairs = enumerate(atoms)
        return cls(str(data.get("space_id", "default")), {int(i): float(m) for i, m in pairs})


def _aligned(mu1, mu2):
    if mu1.space_id != mu2.space_id:
        raise SpaceMismatchError(f"measures live on {mu1.space_id!r} and {mu2.space_id!r}")
    keys = sorted(set(mu1.atoms) | set(mu2.atoms))
    return keys, [mu1.mass(k) for k in keys], [mu2.mass(k) for k in keys]


def f_divergence_terms(F, mu1, mu2):
    keys, r, t = _aligned(mu1, mu2)
    return keys, [perspective(F, ri, ti) for ri, ti in zip(r, t)]


def f_divergence(F, mu1, mu2):
    """``D_F(mu1 || mu2) = sum_i F(r_i / t_i) t_i`` over the union of atoms."""
    _, terms = f_divergence_terms(F, mu1, mu2)
    return math.fsum(terms) if all(math.isfinite(x) for x in terms) else INF


# ----------------------------------------------------------------------
# construction from text


_FAMILIES = {
    "indicator": (Indicator, 2),
    "chi": (ChiAlpha, 1),
    "matusita": (Matusita, 1),
    "powerlike": (PowerLike, 1),
    "powerlog": (PowerLog, 1),
    "doublepower": (DoublePower, 2),
    "tv": (TotalVariationScaled, 1),
}


def _parse_number(tok):
    tok = tok.strip().lower()
    if tok in ("inf", "+inf", "infinity"):
        return INF
    return float(tok)


def make_entropy(family, params=()):
    """Build an entropy from a family name and a parameter list."""
    family = family.strip().lower()
    if family in ("tab", "tabulated"):
        (path,) = params
        return load_tabulated(path)
    if family not in _FAMILIES:
        raise EntropyParameterError(f"unknown entropy family {family!r}")
    cls, n = _FAMILIES[family]
    params = [_parse_number(str(p)) if isinstance(p, str) else float(p) for p in params]
    if len(params) != n:
        raise EntropyParameterError(f"{family} takes {n} parameter(s), got {len(params)}")
    return cls(*params)


def parse_entropy(text):
    """Parse ``family:param1[,param2]``, e.g. ``powerlike:2`` or ``tab:path``."""
    family, _, rest = text.partition(":")
    if family.strip().lower() in ("tab", "tabulated"):
        return load_tabulated(rest)
    params = [p for p in rest.split(",") if p.strip()] if rest else []
    return make_entropy(family, params)


def load_tabulated(path):
    """Read the two-column ``s value`` text format (``inf`` allowed in column 2)."""
    s_vals, f_vals = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EntropyParameterError(f"{path}:{lineno}: expected two columns")
            s_vals.append(float(parts[0]))
            f_vals.append(_parse_number(parts[1]))
    return Tabulated(tuple(s_vals), tuple(f_vals), source=str(path))
