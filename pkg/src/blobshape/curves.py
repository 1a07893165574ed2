"""Reference octant curves used throughout the tests and docs."""

from __future__ import annotations

import numpy as np

from .geometry import OctantCurve


def circle_octant(n: int = 257) -> OctantCurve:
    """Octant of the circle x^2 + y^2 = 2: the Euclidean-optimal shape."""
    return OctantCurve.from_callable(
        lambda x: np.sqrt(2.0 - np.asarray(x, dtype=float) ** 2),
        deriv=lambda x: -np.asarray(x, dtype=float)
        / np.sqrt(2.0 - np.asarray(x, dtype=float) ** 2),
        n=n,
    )


def square_octant(n: int = 65) -> OctantCurve:
    """h == 1: the square [-1, 1]^2 (degenerate a = 1)."""
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return OctantCurve.from_callable(
            lambda x: np.ones_like(np.asarray(x, dtype=float)),
            deriv=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            n=n,
        )


def diamond_octant(n: int = 65) -> OctantCurve:
    """h = 2 - x: the diamond with vertices (+-2, 0), (0, +-2)."""
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return OctantCurve.from_callable(
            lambda x: 2.0 - np.asarray(x, dtype=float),
            deriv=lambda x: -np.ones_like(np.asarray(x, dtype=float)),
            n=n,
        )
