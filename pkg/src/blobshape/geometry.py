"""Boundary curves of the symmetric region.

The region is symmetric under reflection about both axes and both diagonals,
so it is fully described by the octant curve h on [0, 1]: the piece of the
upper boundary between the y-axis and the diagonal y = x, normalized so the
boundary crosses the diagonal at (1, 1).  The full upper boundary w on
[-a, a] is assembled from h and its functional inverse g = h^{-1} on [1, a],
where a = h(0) is the x-intercept.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import CurveValidationError, DomainError

NODE_TOL = 1e-12
DEFAULT_NODES = 257


def chebyshev_nodes(n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Chebyshev-Lobatto points on [lo, hi], endpoints included."""
    k = np.arange(n)
    x = 0.5 * (1.0 - np.cos(np.pi * k / (n - 1)))
    x[0], x[-1] = 0.0, 1.0
    return lo + (hi - lo) * x


@dataclass
class OctantCurve:
    """The boundary restricted to the octant, h: [0, 1] -> [1, a].

    Invariants: h(1) = 1, h(0) = a >= 1, h non-increasing, and h(x) >= x.
    Solver-produced curves additionally satisfy the slope constraints
    h'(0) = 0, h'(1) = -1, and -1 <= h' <= 0; user-supplied curves that
    violate the slope constraints (for example the square h == 1 or the
    diamond h = 2 - x) are accepted with a warning.

    Evaluation uses exact callables when provided.  Otherwise a cubic
    interpolant through the stored nodes is used: a not-a-knot spline when
    it preserves monotonicity (third-order accurate derivatives, which the
    residual evaluators need), with a monotone Hermite fallback for rough
    data where the spline would oscillate.
    """

    nodes: np.ndarray
    values: np.ndarray
    interpolant_order: int = 3
    value_fn: object = None
    deriv_fn: object = None
    _pchip: object = field(default=None, repr=False, compare=False)
    _pchip_deriv: object = field(default=None, repr=False, compare=False)
    _antideriv: object = field(default=None, repr=False, compare=False)

    # -- construction ---------------------------------------------------

    @classmethod
    def from_samples(cls, x, h, strict: bool = False) -> "OctantCurve":
        curve = cls(np.asarray(x, dtype=float), np.asarray(h, dtype=float))
        curve.validate(strict=strict)
        return curve

    @classmethod
    def from_callable(cls, fn, deriv=None, n: int = DEFAULT_NODES,
                      strict: bool = False) -> "OctantCurve":
        x = chebyshev_nodes(n)
        vals = np.asarray(fn(x), dtype=float)
        curve = cls(x, vals, value_fn=fn, deriv_fn=deriv)
        curve.validate(strict=strict)
        return curve

    # -- evaluation ------------------------------------------------------

    def _interp(self):
        if self._pchip is None:
            self._pchip = self._build_interpolant()
        return self._pchip

    def _build_interpolant(self):
        if self.nodes.size >= 8:
            from scipy.interpolate import CubicSpline

            spline = CubicSpline(self.nodes, self.values)
            probe = np.linspace(0.0, 1.0, 2049)
            d = spline.derivative()(probe)
            if np.all(d <= 1e-9) and np.all(spline(probe) >= probe - 1e-9):
                return spline
        return PchipInterpolator(self.nodes, self.values)

    def value(self, x):
        if self.value_fn is not None:
            return np.asarray(self.value_fn(np.asarray(x, dtype=float)), dtype=float)
        return self._interp()(x)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self.deriv_fn is not None:
            return np.asarray(self.deriv_fn(x), dtype=float)
        if self._pchip_deriv is None:
            self._pchip_deriv = self._interp().derivative()
        return self._pchip_deriv(x)

    def integral(self, x):
        """Antiderivative of h from 0 to x."""
        if self._antideriv is None:
            if self.value_fn is not None:
                # dense resample so analytic curves integrate to ~1e-13
                grid = chebyshev_nodes(4 * DEFAULT_NODES + 1)
                self._antideriv = PchipInterpolator(
                    grid, self.value(grid)).antiderivative()
            else:
                self._antideriv = self._interp().antiderivative()
        return self._antideriv(x)

    @property
    def a(self) -> float:
        """x-intercept of the assembled boundary, a = h(0)."""
        return float(self.value(0.0))

    @property
    def b(self) -> float:
        """Diagonal crossing abscissa; 1 by normalization."""
        return 1.0

    # -- validation -------------------------------------------------------

    def validate(self, strict: bool = False):
        x = self.nodes
        v = self.values
        if x.ndim != 1 or x.shape != v.shape or x.size < 2:
            raise CurveValidationError("shape", "nodes and values must be equal-length 1-D arrays")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(v)):
            raise CurveValidationError("finite", "nodes and values must be finite")
        if np.any(np.diff(x) <= 0):
            raise CurveValidationError("nodes_increasing", "x nodes must be strictly increasing")
        if abs(x[0]) > NODE_TOL or abs(x[-1] - 1.0) > NODE_TOL:
            raise CurveValidationError("domain", "x nodes must span [0, 1]")
        if abs(v[-1] - 1.0) > NODE_TOL:
            raise CurveValidationError("endpoint_h1", f"h(1) must equal 1, got {v[-1]!r}")
        if v[0] < 1.0 - 1e-9:
            raise CurveValidationError("endpoint_h0", f"h(0) must be >= 1, got {v[0]!r}")
        if np.any(np.diff(v) > 1e-12):
            raise CurveValidationError("monotone", "h must be non-increasing")
        if np.any(v < x - 1e-9):
            raise CurveValidationError("above_diagonal", "h(x) >= x must hold on [0, 1]")
        slope_tol = 1e-6 if strict else 1e-3
        probe = np.linspace(0.0, 1.0, 201)
        dv = self.derivative(probe)
        slope_ok = (np.all(dv <= slope_tol) and np.all(dv >= -1.0 - slope_tol)
                    and abs(dv[0]) <= slope_tol and abs(dv[-1] + 1.0) <= slope_tol)
        if not slope_ok:
            if strict:
                raise CurveValidationError(
                    "slope", "solver curves need h'(0)=0, h'(1)=-1, -1<=h'<=0")
            warnings.warn(
                "curve violates the optimal-shape slope constraints "
                "(h'(0)=0, h'(1)=-1, -1<=h'<=0); functionals remain valid",
                stacklevel=3)
        return self


class _ScaledCurve:
    """View of an octant curve with both axes scaled by lam.

    Exercises the dimensional homogeneity of the functionals: the scaled
    curve has diagonal crossing b = lam instead of 1, so every integral is
    recomputed on genuinely different numbers.
    """

    def __init__(self, base, lam: float):
        if lam <= 0:
            raise DomainError("scale factor must be positive")
        self.base = base
        self.lam = float(lam)

    @property
    def a(self) -> float:
        return self.lam * self.base.a

    @property
    def b(self) -> float:
        return self.lam * self.base.b

    def value(self, x):
        return self.lam * self.base.value(np.asarray(x, dtype=float) / self.lam)

    def derivative(self, x):
        return self.base.derivative(np.asarray(x, dtype=float) / self.lam)

    def integral(self, x):
        return self.lam**2 * self.base.integral(np.asarray(x, dtype=float) / self.lam)


def invert_octant(h: OctantCurve, y, iters: int = 44):
    """Solve h(x) = y for x in [0, 1], y in [1, a].

    Bisection down to a bracket of width ~1e-13, then one Newton polish.
    """
    y = np.asarray(y, dtype=float)
    a = h.a
    if a < 1.0 + 1e-9:
        raise DomainError("inverse undefined for degenerate curve with a = 1")
    if np.any(y < 1.0 - 1e-9) or np.any(y > a + 1e-9):
        raise DomainError(f"inverse argument outside [1, a={a!r}]")
    lo = np.zeros(y.shape)
    hi = np.ones(y.shape)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        too_low = h.value(mid) < y  # h decreasing: value below y means x past root
        hi = np.where(too_low, mid, hi)
        lo = np.where(too_low, lo, mid)
    x = 0.5 * (lo + hi)
    d = h.derivative(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        step = np.where(np.abs(d) > 1e-14, (h.value(x) - y) / np.where(np.abs(d) > 1e-14, d, 1.0), 0.0)
    x = np.clip(x - step, 0.0, 1.0)
    return x if x.ndim else float(x)


class FullBoundary:
    """The assembled symmetric boundary w on [-a, a].

    w equals h on [0, 1], the numerical inverse g = h^{-1} on [1, a], and is
    even in x.  For the degenerate square-like case a = 1 the [1, a] piece is
    empty and the region is closed by the vertical side at x = 1 (so w(a)
    stays at 1 rather than 0).
    """

    _INVERSE_NODES = 4097

    def __init__(self, octant: OctantCurve):
        self.octant = octant
        self.a = octant.a
        self._g = None
        self._g_guard = self.a  # refined lazily together with _g

    @property
    def b(self) -> float:
        return 1.0

    def _inverse_interp(self):
        # dense inverse sampled at Chebyshev nodes; the panels nearest x = a
        # are excluded from interpolation because g has a vertical tangent
        # there (h'(0) = 0) and are handled by live bisection instead.
        if self._g is None and self.a > 1.0 + 1e-12:
            u = chebyshev_nodes(self._INVERSE_NODES, 1.0, self.a)
            s = invert_octant(self.octant, u)
            s[0], s[-1] = 1.0, 0.0
            self._g = PchipInterpolator(u, s)
            self._g_guard = u[-17]
        return self._g

    def evaluate(self, x):
        """w(x) for |x| <= a."""
        x_in = np.asarray(x, dtype=float)
        scalar = x_in.ndim == 0
        ax = np.abs(np.atleast_1d(x_in))
        if np.any(ax > self.a + 1e-12):
            raise DomainError(f"argument outside [-a, a] with a = {self.a!r}")
        ax = np.minimum(ax, self.a)
        if self.a <= 1.0 + 1e-12:
            out = self.octant.value(np.minimum(ax, 1.0))
            return float(out[0]) if scalar else out
        g = self._inverse_interp()
        out = np.empty(ax.shape)
        inner = ax <= 1.0
        out[inner] = self.octant.value(ax[inner])
        tail = ~inner
        if np.any(tail):
            out[tail] = g(ax[tail])
            near_edge = tail & (ax > self._g_guard)
            if np.any(near_edge):
                out[near_edge] = invert_octant(self.octant, ax[near_edge])
        return float(out[0]) if scalar else out

    def derivative(self, x):
        """w'(x) on the open interval (-a, a); steep near the intercepts."""
        x_in = np.asarray(x, dtype=float)
        scalar = x_in.ndim == 0
        xv = np.atleast_1d(x_in)
        ax = np.abs(xv)
        if np.any(ax >= self.a - 1e-12):
            raise DomainError("derivative unavailable at the vertical tangent x = +/-a")
        sgn = np.where(xv >= 0.0, 1.0, -1.0)
        out = np.empty(ax.shape)
        inner = ax <= 1.0
        out[inner] = self.octant.derivative(ax[inner])
        tail = ~inner
        if np.any(tail):
            s = invert_octant(self.octant, ax[tail])
            out[tail] = 1.0 / self.octant.derivative(s)
        out = sgn * out
        return float(out[0]) if scalar else out


def assemble_full(h: OctantCurve) -> FullBoundary:
    """Assemble the full symmetric boundary from an octant curve.

    Rejects curves whose inverse is undefined: h must be non-increasing, and
    strictly decreasing whenever a > 1.  (Curves are fully validated at
    construction; only invertibility is re-checked here.)
    """
    if h.a > 1.0 + 1e-9:
        probe = np.linspace(0.0, 1.0, 513)
        if np.any(np.diff(h.value(probe)) > 1e-10):
            raise CurveValidationError(
                "monotone", "h must be decreasing to invert")
    return FullBoundary(h)
