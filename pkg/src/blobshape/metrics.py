"""The L_p distance on the plane for p in [1, inf].

p = 1 is the Manhattan metric, p = 2 the Euclidean metric, and p = inf the
maximum (Chebyshev) metric, the limit of the finite-p family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INFINITY = math.inf


@dataclass(frozen=True, order=True)
class PNorm:
    """Metric parameter p.  Finite values must satisfy p >= 1.

    INFINITY is a legal value and compares greater than every finite p.
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v < 1.0:
            raise ValueError(f"p must be a real >= 1 or infinity, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.value)

    @classmethod
    def parse(cls, text: str) -> "PNorm":
        """Parse CLI-style spellings: a decimal literal or the word 'inf'."""
        text = text.strip().lower()
        if text in ("inf", "infinity", "oo"):
            return cls(INFINITY)
        try:
            return cls(float(text))
        except ValueError as exc:
            raise ValueError(f"cannot parse p from {text!r}") from exc

    def __str__(self) -> str:
        if self.is_inf:
            return "inf"
        return repr(self.value)


@dataclass(frozen=True)
class Point2:
    """A point in the plane with finite coordinates."""

    x1: float
    x2: float

    def __post_init__(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2)):
            raise ValueError("coordinates must be finite")


def pair_norm(a, b, p: PNorm):
    """(a^p + b^p)^(1/p) for nonnegative a, b; max(a, b) at p = inf.

    Vectorized and overflow-safe for large finite p: the larger component is
    factored out, so only (min/max)^p is raised to the power.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if p.is_inf:
        return np.maximum(a, b)
    pv = p.value
    if pv == 1.0:
        return a + b
    if pv == 2.0:
        return np.hypot(a, b)
    mx = np.maximum(a, b)
    mn = np.minimum(a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(mx > 0.0, mn / np.where(mx > 0.0, mx, 1.0), 0.0)
    return mx * np.exp(np.log1p(r**pv) / pv)


def lp_distance(a: Point2, b: Point2, p: PNorm) -> float:
    """L_p distance between two points: (|dx1|^p + |dx2|^p)^(1/p)."""
    return float(pair_norm(abs(a.x1 - b.x1), abs(a.x2 - b.x2), p))
