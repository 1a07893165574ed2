"""SVG rendering of the full four-quadrant boundary.

Pure presentation: the outline is drawn from the same (x, w) samples that
go into the curve CSV, with the axes and the diagonal reference lines
y = +-x.  No recomputation happens here, so the image always matches the
emitted data.
"""

from __future__ import annotations

import numpy as np

_SIZE = 640
_MARGIN = 40


def boundary_svg(xs, ws) -> str:
    """Render boundary samples on [0, a] into an SVG document string."""
    xs = np.asarray(xs, dtype=float)
    ws = np.asarray(ws, dtype=float)
    a = max(xs.max(), ws.max())
    scale = (_SIZE - 2 * _MARGIN) / (2 * a)
    mid = _SIZE / 2

    def px(x):
        return mid + x * scale

    def py(y):
        return mid - y * scale

    # full outline: top arc left-to-right, then bottom arc back
    x_full = np.concatenate([-xs[::-1], xs[1:]])
    w_full = np.concatenate([ws[::-1], ws[1:]])
    top = [(px(x), py(w)) for x, w in zip(x_full, w_full)]
    bottom = [(px(x), py(-w)) for x, w in zip(x_full[::-1], w_full[::-1])]
    points = " ".join(f"{x:.2f},{y:.2f}" for x, y in top + bottom)

    edge = a * 1.02
    guides = [
        (px(-edge), py(0), px(edge), py(0)),
        (px(0), py(-edge), px(0), py(edge)),
        (px(-edge), py(-edge), px(edge), py(edge)),
        (px(-edge), py(edge), px(edge), py(-edge)),
    ]
    guide_lines = "\n".join(
        f'  <line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
        f'stroke="#bbbbbb" stroke-width="1" stroke-dasharray="6 4"/>'
        for x1, y1, x2, y2 in guides)

    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
        f'viewBox="0 0 {_SIZE} {_SIZE}">\n'
        f'  <rect width="{_SIZE}" height="{_SIZE}" fill="white"/>\n'
        f"{guide_lines}\n"
        f'  <polygon points="{points}" fill="#dce9f7" fill-opacity="0.55" '
        f'stroke="#1f4e8c" stroke-width="2"/>\n'
        "</svg>\n"
    )


def write_boundary_svg(path, xs, ws):
    with open(path, "w") as fh:
        fh.write(boundary_svg(xs, ws))
