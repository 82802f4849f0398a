"""Weight models on a slit set E: W >= 1 on E, +infinity elsewhere.

Three evaluation models cover all scenarios:

* ``grid``         -- tabulated (x_j, log W(x_j)) pairs inside E; the only
  model that cannot be refined off its table;
* ``perinterval``  -- one constant log W per component (the double-
  exponential staircase weights live here; values are stored in log space
  because exp(exp(n)) overflows float64 from n = 7 on);
* ``eq79``         -- the even log-convex closed form
  log W(x) = pi cot(pi rho) |x|^(2 rho), rho in (0, 1/2].

The shift r turns W into W_r(x) = W(x) (1 + |x|)^r; all evaluators include
it.  W >= 1 is enforced for the unshifted model (shifted variants may dip
below 1 by design; they are used inside summability tests, not as
standalone weights).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .intervals import IntervalSet, locate

__all__ = ["Weight"]


@dataclass(frozen=True)
class Weight:
    support: IntervalSet
    model: str                                  # grid | perinterval | eq79
    shift: float = 0.0
    rho: Optional[float] = None                 # eq79
    grid_x: Optional[tuple[float, ...]] = None  # grid
    grid_logw: Optional[tuple[float, ...]] = None
    interval_logw: Optional[tuple[float, ...]] = None  # perinterval

    def __post_init__(self):
        if self.model == "eq79":
            if self.rho is None or not 0.0 < self.rho <= 0.5:
                raise ValueError("eq79 weight needs rho in (0, 1/2]")
        elif self.model == "grid":
            if not self.grid_x or self.grid_logw is None:
                raise ValueError("grid weight needs points and log-values")
            if len(self.grid_x) != len(self.grid_logw):
                raise ValueError("grid points and values must pair up")
            if any(v < -1e-12 for v in self.grid_logw):
                raise ValueError("weight must satisfy W >= 1 (log W >= 0) on E")
            for x in self.grid_x:
                if locate(self.support, x).kind != "component":
                    raise ValueError(f"grid point {x} lies outside E")
        elif self.model == "perinterval":
            if self.interval_logw is None or len(self.interval_logw) != len(self.support):
                raise ValueError("perinterval weight needs one log-value per component")
            if any(v < 0 for v in self.interval_logw):
                raise ValueError("weight must satisfy W >= 1 on E")
        else:
            raise ValueError(f"unknown weight model {self.model!r}")

    # -- evaluation ---------------------------------------------------------

    @property
    def refinable(self) -> bool:
        """Whether W is evaluable between grid points (continuous models)."""
        return self.model != "grid"

    def log_w(self, x) -> np.ndarray:
        """log W_r at points of E (shift included).  Vectorized."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.model == "eq79":
            cot = math.cos(math.pi * self.rho) / math.sin(math.pi * self.rho)
            base = math.pi * cot * np.abs(x) ** (2.0 * self.rho)
        elif self.model == "perinterval":
            vals = np.asarray(self.interval_logw)
            idx = np.empty(x.size, dtype=np.int64)
            for i, t in enumerate(x):
                loc = locate(self.support, float(t))
                if loc.kind != "component":
                    raise ValueError(f"point {t} lies outside E (W is +inf there)")
                idx[i] = loc.index
            base = vals[idx]
        else:
            xs = np.asarray(self.grid_x)
            vals = np.asarray(self.grid_logw)
            pos = np.searchsorted(xs, x)
            pos = np.clip(pos, 0, xs.size - 1)
            left = np.clip(pos - 1, 0, xs.size - 1)
            nearest = np.where(np.abs(xs[left] - x) <= np.abs(xs[pos] - x), left, pos)
            if np.any(np.abs(xs[nearest] - x) > 1e-9 * (1.0 + np.abs(x))):
                raise ValueError("grid weight evaluated off its table")
            base = vals[nearest]
        return base + self.shift * np.log1p(np.abs(x))

    def with_shift(self, r: float) -> "Weight":
        return Weight(support=self.support, model=self.model, shift=r,
                      rho=self.rho, grid_x=self.grid_x, grid_logw=self.grid_logw,
                      interval_logw=self.interval_logw)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def eq79(cls, support: IntervalSet, rho: float, shift: float = 0.0) -> "Weight":
        return cls(support=support, model="eq79", rho=rho, shift=shift)

    @classmethod
    def per_interval(cls, support: IntervalSet, logw, shift: float = 0.0) -> "Weight":
        return cls(support=support, model="perinterval",
                   interval_logw=tuple(float(v) for v in logw), shift=shift)

    @classmethod
    def constant(cls, support: IntervalSet, value: float, shift: float = 0.0) -> "Weight":
        if value < 1.0:
            raise ValueError("constant weight must be >= 1")
        return cls.per_interval(support, [math.log(value)] * len(support), shift=shift)

    @classmethod
    def from_grid(cls, support: IntervalSet, xs, logw, shift: float = 0.0) -> "Weight":
        return cls(support=support, model="grid",
                   grid_x=tuple(float(v) for v in xs),
                   grid_logw=tuple(float(v) for v in logw), shift=shift)

    # -- serialization --------------------------------------------------------

    def to_text(self) -> str:
        if self.model == "eq79":
            return f"model=eq79 rho={self.rho!r} r={self.shift!r}"
        if self.model == "perinterval":
            vals = ",".join(repr(v) for v in self.interval_logw)
            return f"model=perinterval logw={vals} r={self.shift!r}"
        xs = ",".join(repr(v) for v in self.grid_x)
        vals = ",".join(repr(v) for v in self.grid_logw)
        return f"model=grid x={xs} logw={vals} r={self.shift!r}"

    @classmethod
    def from_text(cls, text: str, support: IntervalSet) -> "Weight":
        kv = dict(tok.split("=", 1) for tok in text.split())
        r = float(kv.get("r", 0.0))
        model = kv["model"]
        if model == "eq79":
            return cls.eq79(support, float(kv["rho"]), shift=r)
        if model == "perinterval":
            vals = [float(v) for v in kv["logw"].split(",")]
            return cls.per_interval(support, vals, shift=r)
        xs = [float(v) for v in kv["x"].split(",")]
        vals = [float(v) for v in kv["logw"].split(",")]
        return cls.from_grid(support, xs, vals, shift=r)
