"""Dev experiment: validate M quadrature against closed-form oracles."""
import math, time
import numpy as np
from blobshape import (PNorm, QuadratureSpec, area_octant, assemble_full,
                       circle_octant, diamond_octant, m_full, m_octant,
                       monte_carlo_m, square_octant)
from blobshape.functionals import m_octant_with_error, m_full_with_error

SQ_L2 = (2 + math.sqrt(2) + 5 * math.asinh(1.0)) / 15  # unit-square mean L2 distance

oracles = {
    ("circle", 1): None,
    ("circle", 2): 512 * math.sqrt(2) * math.pi / 45,
    ("square", 1): 64 / 3,
    ("square", 2): 2 * SQ_L2 * 16,
    ("square", "inf"): 224 / 15,
    ("diamond", 1): 1792 / 15,
    ("diamond", 2): 2 * math.sqrt(2) * SQ_L2 * 64,
    ("diamond", "inf"): 256 / 3,
}

curves = {"circle": circle_octant(), "square": square_octant(), "diamond": diamond_octant()}

q = QuadratureSpec(points_per_axis=32, relative_tolerance=1e-6)
for name, curve in curves.items():
    print(f"--- {name}: A = {area_octant(curve):.12f}")
    for ptxt in [1, 1.5, 2, 3, "inf"]:
        p = PNorm(float("inf") if ptxt == "inf" else float(ptxt))
        t0 = time.time()
        mo, eo = m_octant_with_error(curve, p, q)
        t1 = time.time()
        wb = assemble_full(curve)
        mf, ef = m_full_with_error(wb, p, q)
        t2 = time.time()
        ref = oracles.get((name, ptxt))
        line = f"p={ptxt}: M_oct={mo:.10f} ({t1-t0:.2f}s, est {eo:.2e})  M_full={mf:.10f} ({t2-t1:.2f}s, est {ef:.2e})  rel_diff={abs(mo-mf)/mo:.2e}"
        if ref is not None:
            line += f"  oracle={ref:.10f}  rel_err_oct={abs(mo-ref)/ref:.2e} rel_err_full={abs(mf-ref)/ref:.2e}"
        print(line)
