"""Functional derivatives of M and A, and the stationarity residuals.

Stationarity of D = M / A^(5/2) under pointwise perturbations of the octant
curve h requires

    dM/dh(t) = (5/2) * (M/A) * dA/dh(t),   with dA/dh(t) = 8 identically,

i.e. dM/dh must be constant in t.  Eliminating that constant produces a
nonlinear integral equation for h: an eight-term single integral in octant
form, with an equivalent compact form for the assembled boundary w.  The
optimal curve drives these residuals to zero; evaluating them on a candidate
curve therefore certifies (or refutes) optimality.

At p = 1 repeated integration by parts collapses the octant equation to a
one-dimensional reduced form involving only f(t) = integral_0^t h, h, and
h'; that reduced residual is also provided.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CurveValidationError, QuadratureError
from .geometry import FullBoundary, OctantCurve, invert_octant
from .metrics import PNorm, pair_norm
from .parallel import deterministic_map
from .quadrature import (QuadratureSpec, escalate, panel_rule, refine_crossings,
                         sorted_breaks)


def _residual_ladder(evaluate, q: QuadratureSpec):
    """Escalate a (value, scale) evaluator; a residual may legitimately be
    zero, so convergence is judged against the integrand scale."""
    prev = None
    val = scale = None
    for n in q.ladder():
        val, scale = evaluate(n)
        if prev is not None and abs(val - prev) <= q.relative_tolerance * max(abs(val), scale):
            return val, scale
        prev = val
    achieved = abs(val - prev) / max(abs(val), scale, 1e-300)
    raise QuadratureError(val, achieved, q.relative_tolerance)

FORM_OCTANT = "octant"
FORM_FULL = "full"

_MAXLIKE_P = 64.0


def _is_maxlike(p: PNorm) -> bool:
    return p.is_inf or p.value >= _MAXLIKE_P


@dataclass(frozen=True)
class ResidualProfile:
    """Stationarity residual sampled on a grid of perturbation points.

    ``residuals`` carries the raw integral values (units length^2 for the
    octant form); ``normalized`` divides each by the integral of the
    absolute values of its integrand terms, giving a scale-free measure.
    ``l2_norm`` is the root mean square of the raw residuals.
    """

    t_nodes: np.ndarray
    residuals: np.ndarray
    normalized: np.ndarray
    sup_norm: float
    l2_norm: float
    p: PNorm
    form: str

    @classmethod
    def build(cls, t_nodes, residuals, scales, p, form):
        t_nodes = np.asarray(t_nodes, dtype=float)
        residuals = np.asarray(residuals, dtype=float)
        scales = np.asarray(scales, dtype=float)
        normalized = residuals / np.where(scales > 0.0, scales, 1.0)
        return cls(
            t_nodes=t_nodes,
            residuals=residuals,
            normalized=normalized,
            sup_norm=float(np.max(np.abs(residuals))),
            l2_norm=float(np.sqrt(np.mean(residuals**2))),
            p=p,
            form=form,
        )


# ---------------------------------------------------------------------------
# functional derivatives
# ---------------------------------------------------------------------------

def da_dh() -> float:
    """dA/dh(t) = 8: the area responds uniformly to boundary perturbations."""
    return 8.0


def dm_dh(h: OctantCurve, t: float, p: PNorm, q: QuadratureSpec | None = None) -> float:
    """dM/dh(t): the first variation of M under a perturbation of h at t."""
    q = q or QuadratureSpec()
    t = float(t)
    if not 0.0 < t < 1.0:
        raise CurveValidationError("t_interior", "t must lie in (0, 1)")
    ht = float(h.value(t))
    maxlike = _is_maxlike(p) and q.split_at_kinks

    def evaluate(n: int) -> float:
        xb = sorted_breaks(0.0, 1.0, t) if q.split_at_kinks else sorted_breaks(0.0, 1.0)
        x, wx = panel_rule(xb, n)
        hx = h.value(x)
        dhx = h.derivative(x)

        # region part: integral over 0 <= y <= h(x)
        cands = [np.full_like(x, ht)]
        if maxlike:
            cands += [ht - (x + t), ht + (x + t), ht - np.abs(x - t),
                      ht + np.abs(x - t), (x + t) - ht, np.abs(x - t) - ht]
        yb = sorted_breaks(np.zeros_like(x), hx, *cands)
        y, wy = panel_rule(yb, n)
        x2 = x[:, None]
        ay = np.abs(y - ht)
        k = (pair_norm(x2 + t, ay, p) + pair_norm(np.abs(x2 - t), ay, p)
             + pair_norm(x2 + t, y + ht, p) + pair_norm(np.abs(x2 - t), y + ht, p))
        part1 = float(np.sum(wx * np.sum(wy * k, axis=-1)))

        # boundary part: integral over 0 <= y <= x weighted by -h'(x)
        cands2 = []
        if maxlike:
            cands2 = [ht - t - hx, ht + t - hx, hx + t - ht, hx - t - ht]
        yb2 = sorted_breaks(np.zeros_like(x), x, *cands2) if cands2 else \
            sorted_breaks(np.zeros_like(x), x)
        y2, wy2 = panel_rule(yb2, n)
        kt = (pair_norm(t + hx[:, None], ht - y2, p) + pair_norm(hx[:, None] - t, ht - y2, p)
              + pair_norm(t + hx[:, None], ht + y2, p) + pair_norm(hx[:, None] - t, ht + y2, p))
        part2 = float(np.sum(wx * (-dhx) * np.sum(wy2 * kt, axis=-1)))

        return 16.0 * (part1 + part2)

    value, _ = escalate(evaluate, q)
    return value


# ---------------------------------------------------------------------------
# octant-form integral equation residual
# ---------------------------------------------------------------------------

def _octant_terms(h, x, t, ht, dht, p: PNorm):
    hx = h.value(x)
    dhx = h.derivative(x)
    pn = pair_norm
    terms = (
        (dhx + dht) * pn(np.abs(x - t), hx + ht, p),
        (dhx - dht) * pn(np.abs(x - t), np.abs(hx - ht), p),
        -(dhx + dht) * pn(x + t, np.abs(hx - ht), p),
        -(dhx - dht) * pn(x + t, hx + ht, p),
        (1.0 + dhx * dht) * pn(ht - x, hx + t, p),
        (1.0 - dhx * dht) * pn(ht + x, hx + t, p),
        (dhx * dht - 1.0) * pn(ht - x, hx - t, p),
        -(1.0 + dhx * dht) * pn(ht + x, hx - t, p),
    )
    total = terms[0]
    scale = np.abs(terms[0])
    for term in terms[1:]:
        total = total + term
        scale = scale + np.abs(term)
    return total, scale


def _octant_max_breaks(h, t, ht, p: PNorm, lo: float, hi: float):
    """Crossing points of the max() branches on [lo, hi]."""
    def diffs(x):
        hx = h.value(x)
        return [
            np.abs(x - t) - (hx + ht),
            np.abs(x - t) - np.abs(hx - ht),
            (x + t) - np.abs(hx - ht),
            (x + t) - (hx + ht),
            (ht - x) - (hx + t),
            (ht + x) - (hx + t),
            (ht - x) - (hx - t),
            (ht + x) - (hx - t),
        ]
    roots = []
    for i in range(8):
        roots.extend(refine_crossings(lambda x, i=i: diffs(x)[i], lo, hi, samples=33))
    return roots


def _octant_residual_scaled(h, t: float, p: PNorm, q: QuadratureSpec):
    t = float(t)
    if not 0.0 < t < 1.0:
        raise CurveValidationError("t_interior", "t must lie in (0, 1)")
    ht = float(h.value(t))
    if ht < 1.0 - 1e-9:
        raise CurveValidationError(
            "above_diagonal", "h(t) >= 1 >= x is required by the unsigned powers")
    dht = float(h.derivative(t))

    extra = []
    if _is_maxlike(p) and q.split_at_kinks:
        extra = _octant_max_breaks(h, t, ht, p, 0.0, 1.0)

    def evaluate(n: int):
        xb = sorted_breaks(0.0, 1.0, t, *extra) if q.split_at_kinks \
            else sorted_breaks(0.0, 1.0)
        x, wx = panel_rule(xb, n)
        total, scale = _octant_terms(h, x, t, ht, dht, p)
        return float(np.sum(wx * total)), float(np.sum(wx * scale))

    return _residual_ladder(evaluate, q)


def octant_residual(h: OctantCurve, t: float, p: PNorm,
                    q: QuadratureSpec | None = None) -> float:
    """Octant-form stationarity residual at t in (0, 1); zero at the optimum.

    For p = inf the integrand uses the exact max() reduction of the metric,
    with panels split where the max branches cross.
    """
    value, _ = _octant_residual_scaled(h, t, p, q or QuadratureSpec())
    return value


def octant_residual_profile(h: OctantCurve, p: PNorm,
                            q: QuadratureSpec | None = None,
                            nodes: int = 33, threads=None) -> ResidualProfile:
    """Residual sampled on a uniform interior grid of (0, 1)."""
    q = q or QuadratureSpec()
    ts = np.arange(1, nodes + 1) / (nodes + 1.0)
    pairs = deterministic_map(lambda t: _octant_residual_scaled(h, t, p, q), ts, threads)
    res = [pr[0] for pr in pairs]
    scales = [pr[1] for pr in pairs]
    return ResidualProfile.build(ts, res, scales, p, FORM_OCTANT)


# ---------------------------------------------------------------------------
# full-form integral equation residual
# ---------------------------------------------------------------------------

def _full_bracket(x, t, w, wt, p: PNorm):
    return (pair_norm(np.abs(x - t), w + wt, p)
            - pair_norm(np.abs(x + t), np.abs(w - wt), p))


def _full_bracket_scale(x, t, w, wt, p: PNorm):
    return (pair_norm(np.abs(x - t), w + wt, p)
            + pair_norm(np.abs(x + t), np.abs(w - wt), p))


def _full_residual_scaled(wb, t: float, p: PNorm, q: QuadratureSpec):
    t = float(t)
    a = wb.a
    if not -a < t < a:
        raise CurveValidationError("t_interior", "t must lie in (-a, a)")
    oct_curve = wb.octant
    wt = float(wb.evaluate(t))
    dwt = float(wb.derivative(t))
    split = q.split_at_kinks
    maxlike = _is_maxlike(p) and split

    # inverse abscissae where the outer pieces meet |x| = |t|
    s_t = float(invert_octant(oct_curve, abs(t))) if abs(t) >= 1.0 and a > 1.0 + 1e-9 else None

    def middle_breaks():
        cands = [c for c in (-t, 0.0, t) if -1.0 < c < 1.0]
        if maxlike:
            def d1(x):
                w = wb.evaluate(x)
                return np.abs(x - t) - (w + wt)

            def d2(x):
                w = wb.evaluate(x)
                return np.abs(x + t) - np.abs(w - wt)
            for fn in (d1, d2):
                cands.extend(refine_crossings(fn, -1.0, 1.0, samples=65))
        return cands

    def outer_breaks(sign: int):
        # integrand on the transformed piece x = sign * h(s), s in [0, 1]
        cands = [wt]
        if s_t is not None:
            cands.append(s_t)
        if maxlike:
            def d1(s):
                hs = oct_curve.value(s)
                return np.abs(sign * hs - t) - (s + wt)

            def d2(s):
                hs = oct_curve.value(s)
                return np.abs(sign * hs + t) - np.abs(s - wt)
            for fn in (d1, d2):
                cands.extend(refine_crossings(fn, 0.0, 1.0, samples=65))
        return cands

    mid_cands = middle_breaks() if split else []
    out_plus = outer_breaks(+1) if split else []
    out_minus = outer_breaks(-1) if split else []

    def evaluate(n: int):
        # central piece, |x| <= 1, integrated directly
        xb = sorted_breaks(-1.0, 1.0, *mid_cands)
        x, wx = panel_rule(xb, n)
        w = wb.evaluate(x)
        dw = np.sign(x) * oct_curve.derivative(np.abs(x))
        val = np.sum(wx * (dw + dwt) * _full_bracket(x, t, w, wt, p))
        scl = np.sum(wx * np.abs(dw + dwt) * _full_bracket_scale(x, t, w, wt, p))

        if a > 1.0 + 1e-12:
            # outer pieces via the octant parameterization x = +/- h(s),
            # which absorbs the vertical tangent: w'(x) dx -> ds
            sb = sorted_breaks(0.0, 1.0, *out_plus)
            s, ws = panel_rule(sb, n)
            hs = oct_curve.value(s)
            dhs = oct_curve.derivative(s)
            br = _full_bracket(hs, t, s, wt, p)
            val += np.sum(ws * (-(1.0 + dwt * dhs)) * br)
            scl += np.sum(ws * np.abs(1.0 + dwt * dhs)
                          * _full_bracket_scale(hs, t, s, wt, p))

            sb = sorted_breaks(0.0, 1.0, *out_minus)
            s, ws = panel_rule(sb, n)
            hs = oct_curve.value(s)
            dhs = oct_curve.derivative(s)
            br = _full_bracket(-hs, t, s, wt, p)
            val += np.sum(ws * (1.0 - dwt * dhs) * br)
            scl += np.sum(ws * np.abs(1.0 - dwt * dhs)
                          * _full_bracket_scale(-hs, t, s, wt, p))
        return float(val), float(scl)

    return _residual_ladder(evaluate, q)


def full_residual(w: FullBoundary, t: float, p: PNorm,
                  q: QuadratureSpec | None = None) -> float:
    """Full-form stationarity residual at t in (-a, a); zero at the optimum."""
    value, _ = _full_residual_scaled(w, t, p, q or QuadratureSpec())
    return value


def full_residual_profile(w: FullBoundary, p: PNorm,
                          q: QuadratureSpec | None = None,
                          nodes: int = 33, threads=None) -> ResidualProfile:
    """Residual sampled on a uniform interior grid of (-a, a)."""
    q = q or QuadratureSpec()
    a = w.a
    ts = -a + 2.0 * a * np.arange(1, nodes + 1) / (nodes + 1.0)
    pairs = deterministic_map(lambda t: _full_residual_scaled(w, t, p, q), ts, threads)
    res = [pr[0] for pr in pairs]
    scales = [pr[1] for pr in pairs]
    return ResidualProfile.build(ts, res, scales, p, FORM_FULL)


# ---------------------------------------------------------------------------
# reduced residual for the Manhattan metric
# ---------------------------------------------------------------------------

def reduced_residual_p1(h: OctantCurve, t: float,
                        q: QuadratureSpec | None = None) -> float:
    """Reduced p = 1 stationarity residual at t, via f(t) = integral_0^t h.

    Equivalent to the octant-form residual at p = 1 (up to a positive
    factor) after integration by parts; needs no quadrature beyond the
    antiderivative of h.
    """
    t = float(t)
    if not 0.0 < t < 1.0:
        raise CurveValidationError("t_interior", "t must lie in (0, 1)")
    ft = float(h.integral(t))
    f1 = float(h.integral(1.0))
    ht = float(h.value(t))
    dht = float(h.derivative(t))
    return ft - dht + 2.0 * dht * f1 - dht * ft + dht * ht * t


def reduced_residual_p1_profile(h: OctantCurve, nodes: int = 33,
                                threads=None) -> ResidualProfile:
    ts = np.arange(1, nodes + 1) / (nodes + 1.0)
    res = deterministic_map(lambda t: reduced_residual_p1(h, t), ts, threads)
    ft = h.integral(ts)
    f1 = float(h.integral(1.0))
    dht = h.derivative(ts)
    ht = h.value(ts)
    scales = (np.abs(ft) + np.abs(dht) + np.abs(2.0 * dht * f1)
              + np.abs(dht * ft) + np.abs(dht * ht * ts))
    return ResidualProfile.build(ts, res, scales, PNorm(1.0), FORM_OCTANT)
