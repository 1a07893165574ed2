"""Curve CSV formats shared between the library and the CLI.

Octant files carry the header ``x,h`` with x in [0, 1]; full-boundary files
carry ``x,w`` with x ascending over [0, a] (the negative half follows by
even symmetry).  Values are written with 17 significant digits so binary64
curves round-trip exactly.
"""

from __future__ import annotations

import csv

import numpy as np

from .errors import CsvFormatError
from .geometry import FullBoundary, OctantCurve, chebyshev_nodes

HEADER_OCTANT = ("x", "h")
HEADER_FULL = ("x", "w")


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_octant_csv(path, curve: OctantCurve, resolution: int = 1025):
    """Sample h at Chebyshev points (dense near both endpoints) and write."""
    xs = chebyshev_nodes(resolution)
    hs = curve.value(xs)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER_OCTANT)
        for x, h in zip(xs, hs):
            writer.writerow([_fmt(x), _fmt(h)])


def full_boundary_samples(curve: OctantCurve, resolution: int = 1025):
    """(x, w) samples of the full boundary on [0, a].

    The h piece is sampled at Chebyshev abscissae; the inverse piece reuses
    the exact pairs (h(s), s), so the file is self-consistent under
    inversion by construction.
    """
    n_h = resolution // 2 + 1
    xs_h = chebyshev_nodes(n_h)
    ws_h = np.asarray(curve.value(xs_h), dtype=float)
    if curve.a <= 1.0 + 1e-12:
        return xs_h, ws_h
    s = chebyshev_nodes(resolution - n_h + 1)[::-1][1:]  # descending, skip s=1
    xs_g = np.asarray(curve.value(s), dtype=float)       # ascending from 1 to a
    return np.concatenate([xs_h, xs_g]), np.concatenate([ws_h, s])


def write_full_csv(path, curve: OctantCurve, resolution: int = 1025):
    xs, ws = full_boundary_samples(curve, resolution)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER_FULL)
        for x, w in zip(xs, ws):
            writer.writerow([_fmt(x), _fmt(w)])


def read_curve_csv(path) -> OctantCurve:
    """Parse either curve format back into an octant curve.

    For full-boundary files the rows with x <= 1 define h; the remaining
    rows are redundant under inversion and are spot-checked for
    consistency.  Raises CsvFormatError with a 1-based line number on
    malformed input; curve-invariant violations surface as
    CurveValidationError from the constructor.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise CsvFormatError(1, "empty file")
        header = tuple(col.strip() for col in header)
        if header not in (HEADER_OCTANT, HEADER_FULL):
            raise CsvFormatError(1, f"header must be 'x,h' or 'x,w', got {','.join(header)!r}")
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise CsvFormatError(line_no, f"expected 2 columns, got {len(row)}")
            try:
                rows.append((float(row[0]), float(row[1]), line_no))
            except ValueError:
                raise CsvFormatError(line_no, f"non-numeric value in {row!r}") from None
    if len(rows) < 2:
        raise CsvFormatError(2, "need at least two data rows")
    xs = np.array([r[0] for r in rows])
    vs = np.array([r[1] for r in rows])
    bad = np.nonzero(np.diff(xs) <= 0)[0]
    if bad.size:
        raise CsvFormatError(rows[bad[0] + 1][2], "x values must be strictly ascending")

    if header == HEADER_OCTANT:
        return OctantCurve.from_samples(xs, vs)

    octant_mask = xs <= 1.0 + 1e-12
    xs_h, vs_h = xs[octant_mask], vs[octant_mask]
    if xs_h.size < 2 or abs(xs_h[-1] - 1.0) > 1e-9:
        raise CsvFormatError(rows[0][2], "full-boundary file must sample x = 1")
    xs_h[-1] = 1.0
    curve = OctantCurve.from_samples(xs_h, vs_h)
    tail = ~octant_mask
    if np.any(tail):
        # the tail must be the inverse of h: w(h(s)) = s
        probe_x = xs[tail][:: max(1, tail.sum() // 8)]
        probe_w = vs[tail][:: max(1, tail.sum() // 8)]
        recon = curve.value(np.clip(probe_w, 0.0, 1.0))
        if np.max(np.abs(recon - probe_x)) > 1e-3:
            import warnings

            warnings.warn("full-boundary rows beyond x = 1 are inconsistent "
                          "with the octant inverse; using the octant piece only",
                          stacklevel=2)
    return curve
