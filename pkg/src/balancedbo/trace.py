"""Per-iteration records of a run and the derived regret metrics."""
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class IterationRecord:
    t: int
    method: str
    theta: float
    norm: float
    bound: float
    x: tuple
    y: float
    f: float
    best_y: float
    best_f: float
    regret: float
    cum_regret: float
    best_regret: float
    n_active: int
    eliminated: tuple
    xi: float
    beta: float
    sigma: float
    beta_sigma: float


@dataclass
class RegretTrace:
    method: str
    seed: int
    records: list = field(default_factory=list)
    known_max: float = None
    config_hash: str = ""
    wall_time: float = 0.0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.records)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])

    @property
    def final_cum_regret(self):
        return self.records[-1].cum_regret if self.records else 0.0

    @property
    def final_best_regret(self):
        return self.records[-1].best_regret if self.records else math.nan


def running_metrics(f_values, y_values, known_max):
    """Recompute (best_y, best_f, regret, cum_regret, best_regret) sequentially.

    Uses the same left-to-right float additions as the run loop, so the
    output matches stored columns exactly.
    """
    out = []
    best_y = best_f = -math.inf
    cum = 0.0
    for f, y in zip(f_values, y_values):
        best_y = max(best_y, y)
        best_f = max(best_f, f)
        if known_max is None:
            r = br = math.nan
        else:
            r = known_max - f
            cum = cum + r
            br = known_max - best_f
        out.append((best_y, best_f, r, cum if known_max is not None else math.nan, br))
    return out
