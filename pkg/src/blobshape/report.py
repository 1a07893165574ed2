"""Run reports: a stable JSON schema shared by all CLI commands.

Top-level keys: command, p, method, area, m, d, residual_sup, residual_l2,
a, solver, timing_ms, seed, and optionally disputed_reference.  Identical
inputs produce byte-identical JSON except for the timing_ms field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

DISPUTED_D_EUCLIDEAN = {
    # A published value for the Euclidean circle ratio disagrees with both
    # this package's quadrature and its Monte Carlo oracle; the computed
    # number is (128/45) * pi**-1.5 and the reported one is 16/15 * pi**-1.5
    # (exactly 3/8 of the computed value).  Both are recorded.
    "quantity": "d",
    "reported": 16.0 / 15.0 * math.pi ** -1.5,
    "computed": 128.0 / 45.0 * math.pi ** -1.5,
    "status": "disputed",
}


def p_to_json(p) -> object:
    return "inf" if p.is_inf else p.value


@dataclass
class RunReport:
    command: str
    p: object
    method: str
    area: float = None
    m: float = None
    d: float = None
    residual_sup: float = None
    residual_l2: float = None
    a: float = None
    solver: dict = field(default_factory=dict)
    timing_ms: float = 0.0
    seed: int = None
    disputed_reference: dict = None

    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "p": p_to_json(self.p),
            "method": self.method,
            "area": self.area,
            "m": self.m,
            "d": self.d,
            "residual_sup": self.residual_sup,
            "residual_l2": self.residual_l2,
            "a": self.a,
            "solver": self.solver,
            "timing_ms": self.timing_ms,
            "seed": self.seed,
        }
        if self.disputed_reference is not None:
            out["disputed_reference"] = self.disputed_reference
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())
