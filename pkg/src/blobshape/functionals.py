"""The area functional A, pairwise-distance functional M, and ratio D.

For a region with octant curve h (full boundary w),

    A = 8 * integral_0^1 (h(x) - x) dx
    M = integral over the region, twice, of the pairwise L_p distance
    D = M / A^(5/2)

D is dimensionless: M scales as length^5 and A as length^2, so D is
invariant under uniform rescaling of the region.  Smaller D means a better
(shorter average distance) shape.

M is computed two independent ways.  The octant form integrates over the
octant (x, y) with an inner integral written purely in terms of h and h',
the full form keeps the inner integral over the assembled boundary w on
[0, a].  Both reduce the innermost axis to the primitive
integral_0^c (alpha^p + t^p)^(1/p) dt, exact at p in {1, 2, inf}, and split
the remaining axes at every absolute-value and max() kink.  A Monte Carlo
estimator provides a quadrature-free oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import FullBoundary, OctantCurve, _ScaledCurve
from .metrics import PNorm, pair_norm
from .parallel import deterministic_map, resolve_threads
from .quadrature import QuadratureSpec, escalate, gauss_rule, monotone_root, panel_rule, sorted_breaks

# Above this finite p the integrands are treated as max-like for splitting:
# their kinks have smoothed into boundary layers of width ~1/p that Gauss
# panels cannot see without the same splits.
P_SPLIT_AS_MAX = 64.0

METHOD_OCTANT = "octant_quadrature"
METHOD_FULL = "full_quadrature"
METHOD_MC = "monte_carlo"


@dataclass(frozen=True)
class FunctionalReport:
    """Computed A, M, D for one curve and metric, with provenance."""

    area: float
    m_value: float
    d_value: float
    error_estimate: float
    p: PNorm
    method: str


# ---------------------------------------------------------------------------
# primitive: G(alpha, c) = integral_0^c (alpha^p + t^p)^(1/p) dt
# ---------------------------------------------------------------------------

def _primitive(alpha, c, p: PNorm, n_g: int):
    alpha = np.asarray(alpha, dtype=float)
    c = np.asarray(c, dtype=float)
    if p.is_inf:
        return np.where(c <= alpha, alpha * c, 0.5 * (alpha * alpha + c * c))
    pv = p.value
    if pv == 1.0:
        return alpha * c + 0.5 * c * c
    if pv == 2.0:
        r = np.hypot(alpha, c)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_term = np.where(alpha > 0.0,
                                np.arcsinh(c / np.where(alpha > 0.0, alpha, 1.0)),
                                0.0)
        return 0.5 * (c * r + alpha * alpha * log_term)
    xi, wi = gauss_rule(n_g)
    alpha, c = np.broadcast_arrays(alpha, c)
    if alpha.size * n_g > 8_000_000:
        # slab over the leading axis to bound peak memory
        out = np.empty(alpha.shape)
        step = max(1, 8_000_000 // max(1, int(np.prod(alpha.shape[1:], dtype=int)) * n_g))
        for i in range(0, alpha.shape[0], step):
            sl = slice(i, i + step)
            vals = pair_norm(alpha[sl][..., None], c[sl][..., None] * xi, p)
            out[sl] = c[sl] * (vals @ wi)
        return out
    vals = pair_norm(alpha[..., None], c[..., None] * xi, p)
    return c * (vals @ wi)


def _phi(alpha, y, v, p: PNorm, n_g: int):
    """integral_0^v ((alpha^p + |y-t|^p)^(1/p) + (alpha^p + (y+t)^p)^(1/p)) dt."""
    return (_primitive(alpha, y + v, p, n_g)
            - _primitive(alpha, np.maximum(y - v, 0.0), p, n_g)
            + _primitive(alpha, np.maximum(v - y, 0.0), p, n_g))


def _split_like_max(p: PNorm, split: bool) -> bool:
    return split and (p.is_inf or p.value >= P_SPLIT_AS_MAX)


def _vec_inverse(curve, y, iters: int = 50):
    """Bisection solve of curve.value(x) = y on [0, b] (decreasing value)."""
    b = curve.b
    y = np.asarray(y, dtype=float)
    lo = np.zeros(np.shape(y))
    hi = np.full(np.shape(y), b)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = curve.value(mid) < y
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# area
# ---------------------------------------------------------------------------

def area_octant(h: OctantCurve, scale: float = 1.0) -> float:
    """A = 8 * integral_0^b (h(x) - x) dx, eight times the octant area."""
    curve = _ScaledCurve(h, scale) if scale != 1.0 else h
    b = curve.b
    return float(8.0 * (curve.integral(b) - 0.5 * b * b))


# ---------------------------------------------------------------------------
# M, octant form
# ---------------------------------------------------------------------------

def _m_eval_octant(curve, p: PNorm, n: int, split: bool, threads=None) -> float:
    b = curve.b
    a = curve.a
    maxish = _split_like_max(p, split)
    n_g = max(16, n // 2 + 8)
    xs, wxs = panel_rule(np.array([0.0, b]), n)

    def chunk_value(sl):
        x1 = xs[sl]                               # (cx,)
        wx = wxs[sl]
        hx = curve.value(x1)
        yb = sorted_breaks(x1, hx, b, a - x1)     # (cx, 4)
        y, wy = panel_rule(yb, n)                 # (cx, 3n)
        x = x1[:, None]                           # against y
        x3 = x1[:, None, None]                    # against inner axes
        y3 = y[..., None]
        zeros = np.zeros_like(y)
        bfull = np.full_like(y, b)

        # inverse split point for the |y - v| kink against the v-limit h(u)
        gy = np.where(y > b, _vec_inverse(curve, np.maximum(y, b)), b)

        if maxish:
            r1 = monotone_root(lambda u: curve.value(u) - u - (x + y), zeros, bfull)
            r2 = monotone_root(lambda u: curve.value(u) + u - (x + y), zeros, bfull)
            r3 = monotone_root(lambda u: curve.value(u) - u - (y - x), zeros, bfull)
            ub = sorted_breaks(zeros, bfull, x + zeros, gy, r1, r2, r3)
        elif split:
            ub = sorted_breaks(zeros, bfull, x + zeros, gy)
        else:
            ub = sorted_breaks(zeros, bfull)
        u, wu = panel_rule(ub, n)
        vu = curve.value(u)
        t1 = _phi(x3 + u, y3, vu, p, n_g) + _phi(np.abs(x3 - u), y3, vu, p, n_g)
        t1 = np.sum(wu * t1, axis=-1)

        if maxish:
            s2 = monotone_root(lambda s: curve.value(s) + s - (x + y), zeros, bfull)
            s3 = monotone_root(lambda s: curve.value(s) - s - (y - x), zeros, bfull)
            sb = sorted_breaks(zeros, bfull, y, s2, s3)
        elif split:
            sb = sorted_breaks(zeros, bfull, y)
        else:
            sb = sorted_breaks(zeros, bfull)
        s, ws = panel_rule(sb, n)
        hs = curve.value(s)
        t2 = _phi(x3 + hs, y3, s, p, n_g) + _phi(hs - x3, y3, s, p, n_g)
        t2 = np.sum(ws * (-curve.derivative(s)) * t2, axis=-1)

        return float(np.sum(wx[:, None] * wy * (t1 + t2)))

    chunk = max(1, int(round(8 * (32.0 / n) ** 3)))
    slices = [slice(i, i + chunk) for i in range(0, len(xs), chunk)]
    parts = deterministic_map(chunk_value, slices, threads)
    return 8.0 * math.fsum(parts)


def m_octant(h: OctantCurve, p: PNorm, q: QuadratureSpec | None = None,
             scale: float = 1.0, threads=None) -> float:
    """M in octant form; h must be differentiable (h' enters the integrand)."""
    value, _ = m_octant_with_error(h, p, q, scale=scale, threads=threads)
    return value


def m_octant_with_error(h: OctantCurve, p: PNorm, q: QuadratureSpec | None = None,
                        scale: float = 1.0, threads=None):
    q = q or QuadratureSpec()
    curve = _ScaledCurve(h, scale) if scale != 1.0 else h
    return escalate(lambda n: _m_eval_octant(curve, p, n, q.split_at_kinks, threads), q)


# ---------------------------------------------------------------------------
# M, full-boundary form
# ---------------------------------------------------------------------------

def _m_eval_full(wb, p: PNorm, n: int, split: bool, threads=None) -> float:
    oct_curve = wb.octant
    b = wb.b
    a = wb.a
    maxish = _split_like_max(p, split)
    n_g = max(16, n // 2 + 8)
    xs, wxs = panel_rule(np.array([0.0, b]), n)

    def w_of(u):
        return wb.evaluate(np.minimum(u, a))

    def chunk_value(sl):
        x1 = xs[sl]
        wx = wxs[sl]
        hx = oct_curve.value(x1)
        yb = sorted_breaks(x1, hx, b, a - x1)
        y, wy = panel_rule(yb, n)
        x = x1[:, None]
        x3 = x1[:, None, None]
        y3 = y[..., None]
        zeros = np.zeros_like(y)

        # u where the boundary height crosses y: on [0, b] it is the inverse
        # of h, on [b, a] it is h itself evaluated at y.
        ustar = np.where(y > b, _vec_inverse(oct_curve, np.maximum(y, b)),
                         oct_curve.value(np.minimum(y, b)))

        if maxish:
            d1 = monotone_root(lambda u: w_of(u) - u - (x + y), zeros, a + zeros)
            d2 = monotone_root(lambda u: w_of(u) - u - (y - x), zeros, a + zeros)
            d3 = monotone_root(lambda u: w_of(u) - u - (x - y), zeros, a + zeros)
            d4 = monotone_root(lambda u: w_of(u) - u + (x + y), zeros, a + zeros)
            e1 = monotone_root(lambda u: w_of(u) + u - (x + y), zeros, b + zeros)
            e2 = monotone_root(lambda u: w_of(u) + u - (x + y), b + zeros, a + zeros)
            ub = sorted_breaks(zeros, a + zeros, x + zeros, b + zeros, ustar,
                               d1, d2, d3, d4, e1, e2)
        elif split:
            ub = sorted_breaks(zeros, a + zeros, x + zeros, b + zeros, ustar)
        else:
            ub = sorted_breaks(zeros, a + zeros, b + zeros)
        u, wu = panel_rule(ub, n)
        if a > b + 1e-12:
            # the boundary height w behaves like sqrt(a - u) at the intercept,
            # so map the final panel through u = a - tau^2 to smooth it out
            xi, wi = gauss_rule(n)
            width = a - ub[..., -2:-1]
            u[..., -n:] = a - width * xi**2
            wu[..., -n:] = 2.0 * width * xi * wi
        vu = w_of(u)
        t = _phi(x3 + u, y3, vu, p, n_g) + _phi(np.abs(x3 - u), y3, vu, p, n_g)
        t = np.sum(wu * t, axis=-1)
        return float(np.sum(wx[:, None] * wy * t))

    chunk = max(1, int(round(6 * (32.0 / n) ** 3)))
    slices = [slice(i, i + chunk) for i in range(0, len(xs), chunk)]
    parts = deterministic_map(chunk_value, slices, threads)
    return 8.0 * math.fsum(parts)


def m_full(w: FullBoundary, p: PNorm, q: QuadratureSpec | None = None,
           threads=None) -> float:
    """M over the assembled boundary; agrees with the octant form."""
    value, _ = m_full_with_error(w, p, q, threads=threads)
    return value


def m_full_with_error(w: FullBoundary, p: PNorm, q: QuadratureSpec | None = None,
                      threads=None):
    q = q or QuadratureSpec()
    return escalate(lambda n: _m_eval_full(w, p, n, q.split_at_kinks, threads), q)


# ---------------------------------------------------------------------------
# D
# ---------------------------------------------------------------------------

def d_value(h: OctantCurve, p: PNorm, q: QuadratureSpec | None = None,
            scale: float = 1.0, threads=None) -> FunctionalReport:
    """D = M / A^(5/2); dimensionless, scale-invariant, smaller is better."""
    area = area_octant(h, scale=scale)
    m, m_err = m_octant_with_error(h, p, q, scale=scale, threads=threads)
    denom = area ** 2.5
    return FunctionalReport(
        area=area,
        m_value=m,
        d_value=m / denom,
        error_estimate=m_err / denom,
        p=p,
        method=METHOD_OCTANT,
    )


# ---------------------------------------------------------------------------
# Monte Carlo oracle
# ---------------------------------------------------------------------------

_MIX_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX_C1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_C2 = np.uint64(0x94D049BB133111EB)
_FIELD_A = np.uint64(0xD6E8FEB86659FD93)
_FIELD_B = np.uint64(0xA5CB3B207D9D2B6F)

MC_MIN_SAMPLES = 1000
MC_MIN_ACCEPT_RATE = 0.01
_MC_BATCH = 1 << 16
_MC_MAX_ROUNDS = 4096


def _mix64(z):
    # splitmix64 finalizer
    z = (z ^ (z >> np.uint64(30))) * _MIX_C1
    z = (z ^ (z >> np.uint64(27))) * _MIX_C2
    return z ^ (z >> np.uint64(31))


def _stream_uniform(seed, index, counter):
    """Uniform in [0, 1) keyed by (seed, sample index, draw counter)."""
    mask = 0xFFFFFFFFFFFFFFFF
    seed_key = np.uint64((int(seed) + int(_MIX_GAMMA)) & mask)
    ctr_key = np.uint64((int(counter) * int(_FIELD_B)) & mask)
    z = _mix64(seed_key ^ (index.astype(np.uint64) * _FIELD_A))
    z = _mix64(z ^ ctr_key)
    return (z >> np.uint64(11)).astype(np.float64) / float(1 << 53)


def _sample_points(wb, seed, index):
    """Rejection-sample one region point per stream index; deterministic."""
    a = wb.a
    n = index.size
    x = np.empty(n)
    y = np.empty(n)
    pending = np.arange(n)
    counter = 0
    proposals = 0
    while pending.size:
        if counter >= _MC_MAX_ROUNDS:
            raise DomainError("rejection sampling failed to terminate")
        idx = index[pending]
        cx = (2.0 * _stream_uniform(seed, idx, 2 * counter) - 1.0) * a
        cy = (2.0 * _stream_uniform(seed, idx, 2 * counter + 1) - 1.0) * a
        proposals += pending.size
        ok = np.abs(cy) <= wb.evaluate(cx)
        hit = pending[ok]
        x[hit] = cx[ok]
        y[hit] = cy[ok]
        pending = pending[~ok]
        counter += 1
    return x, y, proposals


def monte_carlo_m(w: FullBoundary, p: PNorm, samples: int, seed: int,
                  threads=None):
    """Monte Carlo estimate of M with its standard error.

    Point pairs are rejection-sampled uniformly from the region using a
    counter-based generator keyed by (seed, sample index), so the result is
    reproducible and independent of batching or worker count.  Returns
    (A^2 * mean pairwise distance, standard error).
    """
    samples = int(samples)
    if samples < MC_MIN_SAMPLES:
        raise DomainError(f"need at least {MC_MIN_SAMPLES} samples, got {samples}")
    area = area_octant(w.octant)

    starts = list(range(0, samples, _MC_BATCH))

    def batch_stats(start):
        count = min(_MC_BATCH, samples - start)
        idx = np.arange(start, start + count, dtype=np.uint64)
        x1, y1, prop1 = _sample_points(w, seed, idx * np.uint64(2))
        x2, y2, prop2 = _sample_points(w, seed, idx * np.uint64(2) + np.uint64(1))
        d = pair_norm(np.abs(x1 - x2), np.abs(y1 - y2), p)
        return float(np.sum(d)), float(np.sum(d * d)), count, prop1 + prop2

    results = deterministic_map(batch_stats, starts, threads)
    total = math.fsum(r[0] for r in results)
    total_sq = math.fsum(r[1] for r in results)
    n = sum(r[2] for r in results)
    proposals = sum(r[3] for r in results)
    accept_rate = 2.0 * n / proposals
    if accept_rate < MC_MIN_ACCEPT_RATE:
        raise DomainError(
            f"acceptance rate {accept_rate:.4f} below {MC_MIN_ACCEPT_RATE}; degenerate curve")
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / max(n - 1, 1)
    se = math.sqrt(var / n)
    return area * area * mean, area * area * se
