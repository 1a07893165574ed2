"""Optimal curves for the three special metrics p = 1, 2, inf.

At p = 2 the stationarity equation collapses to w'(x) w(x) + x = 0, whose
normalized solution is the circle h(x) = sqrt(2 - x^2).

At p = 1 and p = inf the integral equation reduces to second-order ODEs for
f(t) = integral_0^t h, with boundary conditions f(0) = 0 and f'(1) = 1:

    p = 1:   t f' f'' + (2 f(1) - 1) f'' + f - f'' f = 0
    p = inf: 4 f'' f(1) - t^2 f'' - 2 t f' + 4 f + f'' (f')^2 - 2 f'' = 0

Both contain the unknown constant f(1), which is resolved by a damped
fixed-point sweep around an inner shooting solve: isolate f'', integrate
with an adaptive embedded Runge-Kutta pair from f(0) = 0 with trial slope
f'(0) = a, and root-find the slope against the target f'(1) = 1.

A useful consequence of the isolated-f'' algebra: at t = 0 the numerator
vanishes (f(0) = 0), giving h'(0) = 0 automatically, and at t = 1 both
equations force f''(1) = -1, so the diagonal-crossing slope h'(1) = -1 is
satisfied by construction rather than imposed.  The achieved value is
recorded, not forced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import ConvergenceError
from .geometry import OctantCurve
from .variational import reduced_residual_p1

F1_CIRCLE = np.pi / 4.0 + 0.5       # integral of sqrt(2 - x^2) on [0, 1]
SLOPE_CIRCLE = np.sqrt(2.0)
OUTER_CAP = 100
OUTER_DAMPING = 0.5
_DEN_FLOOR = 1e-9


@dataclass(frozen=True)
class OdeSolution:
    """Converged reduced-equation solve for f(t) = integral_0^t h.

    residual_sup is the sup-norm of the reduced stationarity equation
    re-evaluated on the returned curve, with f recomputed by integrating the
    curve itself (so the closure is not merely the integrator's tautology).
    """

    t_values: np.ndarray
    f_values: np.ndarray
    h_values: np.ndarray
    a: float
    f1: float
    residual_sup: float
    iterations: int
    h_prime_end: float


def solve_p2(n: int = 257) -> OctantCurve:
    """Euclidean optimum: the circle of radius sqrt(2), h = sqrt(2 - x^2)."""
    return OctantCurve.from_callable(
        lambda x: np.sqrt(2.0 - np.asarray(x, dtype=float) ** 2),
        deriv=lambda x: -np.asarray(x, dtype=float)
        / np.sqrt(2.0 - np.asarray(x, dtype=float) ** 2),
        n=n,
        strict=True,
    )


def _rhs_p1(f1: float):
    def rhs(t, y):
        f, fp = y
        den = t * fp + 2.0 * f1 - 1.0 - f
        return [fp, -f / den]

    def den_fn(t, y):
        return t * y[1] + 2.0 * f1 - 1.0 - y[0]

    return rhs, den_fn


def _rhs_pinf(f1: float):
    def rhs(t, y):
        f, fp = y
        den = 4.0 * f1 - t * t + fp * fp - 2.0
        return [fp, (2.0 * t * fp - 4.0 * f) / den]

    def den_fn(t, y):
        return 4.0 * f1 - t * t + y[1] * y[1] - 2.0

    return rhs, den_fn


def _integrate(rhs, den_fn, slope, ivp_tol, dense=False, max_step=np.inf):
    def guard(t, y):
        return den_fn(t, y) - _DEN_FLOOR
    guard.terminal = True
    guard.direction = -1
    sol = solve_ivp(rhs, (0.0, 1.0), [0.0, slope], method="RK45",
                    rtol=ivp_tol, atol=ivp_tol, dense_output=dense,
                    events=guard, max_step=max_step)
    return sol


def _shoot(rhs_factory, f1, tol, bracket=(1.0 + 1e-6, 3.0)):
    """Find the initial slope a = f'(0) so that f'(1) = 1."""
    rhs, den_fn = rhs_factory(f1)
    ivp_tol = max(tol * 1e-2, 1e-13)

    def endpoint_misfit(slope):
        for max_step in (np.inf, 0.05, 0.01):
            sol = _integrate(rhs, den_fn, slope, ivp_tol, max_step=max_step)
            if sol.status == 0:
                return sol.y[1, -1] - 1.0
        raise ConvergenceError(
            f"quasilinear coefficient vanished mid-integration at slope {slope!r}")

    lo, hi = bracket
    flo = endpoint_misfit(lo)
    fhi = endpoint_misfit(hi)
    if flo * fhi > 0:
        raise ConvergenceError(
            f"shooting bracket {bracket} does not straddle f'(1) = 1")
    slope = brentq(endpoint_misfit, lo, hi, xtol=max(tol * 1e-2, 1e-14))
    final = _integrate(rhs, den_fn, slope, ivp_tol, dense=True)
    return slope, final


def _pinf_reduced_residual(h: OctantCurve, t: float) -> float:
    """Reduced p = inf stationarity equation evaluated on a curve."""
    ht = float(h.value(t))
    dht = float(h.derivative(t))
    ft = float(h.integral(t))
    f1 = float(h.integral(1.0))
    return (4.0 * dht * f1 - t * t * dht - 2.0 * t * ht + 4.0 * ft
            + dht * ht * ht - 2.0 * dht)


def _solve_reduced(rhs_factory, reduced_residual, tol: float, grid_size: int):
    if tol < 1e-12:
        raise ValueError("tol below 1e-12 is not resolvable by the integrator")
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")

    f1 = F1_CIRCLE
    trace = []
    slope = SLOPE_CIRCLE
    final = None
    for iteration in range(1, OUTER_CAP + 1):
        slope, final = _shoot(rhs_factory, f1, tol)
        f1_new = float(final.y[0, -1])
        trace.append((f1, slope, f1_new))
        delta = f1_new - f1
        f1 = f1 + OUTER_DAMPING * delta
        if abs(delta) <= tol * 0.1:
            break
    else:
        raise ConvergenceError(
            f"self-consistency sweep on f(1) did not settle in {OUTER_CAP} rounds",
            trace=trace)

    dense = final.sol
    rhs, _ = rhs_factory(f1)

    def states_at(x):
        x = np.asarray(x, dtype=float)
        flat = dense(np.clip(x.reshape(-1), 0.0, 1.0))
        return x, flat.reshape((2,) + x.shape)

    def h_of(x):
        x, y = states_at(x)
        return y[1]

    def dh_of(x):
        x, y = states_at(x)
        return np.asarray(rhs(x, (y[0], y[1]))[1], dtype=float)

    curve = OctantCurve.from_callable(h_of, deriv=dh_of, n=513, strict=True)

    ts = np.linspace(0.0, 1.0, grid_size + 1)
    states = dense(ts)
    probe = np.linspace(0.0, 1.0, 257)[1:-1]
    residual_sup = float(max(abs(reduced_residual(curve, t)) for t in probe))
    return curve, OdeSolution(
        t_values=ts,
        f_values=states[0],
        h_values=states[1],
        a=float(slope),
        f1=float(f1),
        residual_sup=residual_sup,
        iterations=iteration,
        h_prime_end=float(dh_of(1.0)),
    )


def solve_p1(tol: float = 1e-10, grid_size: int = 2048):
    """Manhattan-metric optimum.  Returns (curve, solve record)."""
    return _solve_reduced(_rhs_p1, lambda h, t: reduced_residual_p1(h, t),
                          tol, grid_size)


def solve_pinf(tol: float = 1e-10, grid_size: int = 2048):
    """Max-metric optimum.  Returns (curve, solve record)."""
    return _solve_reduced(_rhs_pinf, _pinf_reduced_residual, tol, grid_size)
