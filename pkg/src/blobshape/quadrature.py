"""Gauss-Legendre quadrature with kink-aware panel splitting.

The integrands in this package are smooth except along known loci coming
from absolute values and from max() branches.  Accuracy is restored by
splitting the integration interval into panels at those points and applying
a tensor Gauss-Legendre rule on each panel.  Panel edges may be supplied as
arrays so that whole grids of integrals share one vectorized evaluation;
zero-width panels are legal and contribute nothing, which makes clamped
(kink absent) candidates harmless.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureError

ESCALATION_STEPS = (0, 16, 32)


@dataclass(frozen=True)
class QuadratureSpec:
    """Deterministic quadrature controls used by the functionals.

    points_per_axis: Gauss-Legendre points per panel on each axis.
    split_at_kinks: split panels at absolute-value and max() kinks.
    relative_tolerance: target relative error.  Evaluations escalate the
        point count twice; if consecutive refinements still disagree by more
        than this, a QuadratureError carrying the best estimate is raised.
    """

    points_per_axis: int = 32
    split_at_kinks: bool = True
    relative_tolerance: float = 1e-6

    def __post_init__(self):
        if self.points_per_axis < 4:
            raise ValueError("points_per_axis must be at least 4")
        if not 0.0 < self.relative_tolerance <= 1e-2:
            raise ValueError("relative_tolerance must lie in (0, 1e-2]")

    def ladder(self):
        return tuple(self.points_per_axis + s for s in ESCALATION_STEPS)


@lru_cache(maxsize=128)
def gauss_rule(n: int):
    """Gauss-Legendre nodes and weights mapped onto [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x = (x + 1.0) / 2.0
    w = w / 2.0
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(breaks, n: int):
    """Map an n-point Gauss rule onto consecutive panels.

    breaks: array (..., k+1) of ascending panel edges.  Zero-width panels
    are allowed.  Returns nodes and weights of shape (..., k*n).
    """
    xi, wi = gauss_rule(n)
    breaks = np.asarray(breaks, dtype=float)
    lo = breaks[..., :-1, None]
    width = breaks[..., 1:, None] - lo
    nodes = lo + width * xi
    weights = width * wi
    out_shape = breaks.shape[:-1] + (-1,)
    return nodes.reshape(out_shape), weights.reshape(out_shape)


def sorted_breaks(lo, hi, *interior):
    """Ascending panel edges on [lo, hi] with interior candidates clamped in.

    All arguments broadcast together.  Candidates outside [lo, hi] collapse
    onto the nearest endpoint and yield zero-width panels.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    shape = np.broadcast_shapes(lo.shape, hi.shape,
                                *(np.shape(c) for c in interior))
    cols = [np.broadcast_to(lo, shape)]
    for cand in interior:
        cand = np.broadcast_to(np.asarray(cand, dtype=float), shape)
        cols.append(np.clip(cand, lo, hi))
    cols.append(np.broadcast_to(hi, shape))
    return np.sort(np.stack(cols, axis=-1), axis=-1)


def monotone_root(fn, lo, hi, iters: int = 60):
    """Vectorized bisection for a monotone function on [lo, hi].

    Returns the root where fn changes sign across the interval, otherwise
    the endpoint with the smaller |fn| (so the result is always a valid
    panel-split candidate).
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    flo = np.asarray(fn(lo), dtype=float)
    fhi = np.asarray(fn(hi), dtype=float)
    shape = np.broadcast_shapes(lo.shape, hi.shape, flo.shape, fhi.shape)
    a = np.broadcast_to(lo, shape).copy()
    b = np.broadcast_to(hi, shape).copy()
    fa = np.broadcast_to(flo, shape).copy()
    bracketed = np.sign(fa) * np.sign(np.broadcast_to(fhi, shape)) <= 0
    for _ in range(iters):
        mid = 0.5 * (a + b)
        fm = np.asarray(fn(mid), dtype=float)
        go_left = np.sign(fm) == np.sign(fa)
        a = np.where(go_left, mid, a)
        fa = np.where(go_left, fm, fa)
        b = np.where(go_left, b, mid)
    root = 0.5 * (a + b)
    fallback = np.where(np.abs(flo) <= np.abs(fhi), lo, hi)
    return np.where(bracketed, root, np.broadcast_to(fallback, shape))


def refine_crossings(fn, lo: float, hi: float, samples: int = 65):
    """Locate sign changes of a scalar-vectorized function on [lo, hi].

    Used to split max() branch crossings for curves whose structure is not
    known a priori.  Returns a (possibly empty) list of crossing abscissae.
    """
    if hi - lo <= 0.0:
        return []
    xs = np.linspace(lo, hi, samples)
    fs = np.asarray(fn(xs), dtype=float)
    sign = np.sign(fs)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    roots = []
    for i in flips:
        a, b = xs[i], xs[i + 1]
        fa = fs[i]
        for _ in range(50):
            m = 0.5 * (a + b)
            fm = float(fn(np.array([m]))[0])
            if np.sign(fm) == np.sign(fa):
                a, fa = m, fm
            else:
                b = m
        roots.append(0.5 * (a + b))
    return roots


def escalate(evaluator, spec: QuadratureSpec):
    """Run ``evaluator(n)`` along the escalation ladder until converged.

    Returns (value, absolute_error_estimate).  Raises QuadratureError when
    the ladder is exhausted without meeting the relative tolerance.
    """
    ladder = spec.ladder()
    prev = None
    best = None
    achieved = np.inf
    for n in ladder:
        val = evaluator(n)
        if prev is not None:
            scale = max(abs(val), abs(prev), 1e-300)
            achieved = abs(val - prev) / scale
            best = val
            if achieved <= spec.relative_tolerance:
                return val, abs(val - prev)
        prev = val
    raise QuadratureError(best, achieved, spec.relative_tolerance)
