"""Polynomial-density diagnostics from finite-degree extremal data.

True density of polynomials in the weighted space is an asymptotic
statement; everything here is a truncated, labeled heuristic:

* per-degree majorant integrals against three measures (the sampled
  hitting measure on E, the Poisson density dx/(1+x^2), and the power-gap
  density dx/(1 + |x|^(1+1/p)));
* summability tests sum_n W_r(lambda_n)/|F'(lambda_n)| over the zeros of a
  candidate zero-type function (convergence decided by a decade-ratio
  heuristic on the partial sums);
* a verdict combining both: growth of the chosen integral without apparent
  bound, or geometric growth of witness values at a non-real probe point,
  suggests density; a plateau together with a convergent summability test
  suggests non-density; anything else is inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .extremal import HallProfile, hall_majorant_n, hall_profile
from .harmonic import HarmonicMeasureEstimate
from .krein import KreinFunction
from .weights import Weight

__all__ = [
    "DensityDiagnostics", "DeBrangesSum", "Verdict",
    "mergelyan_integral_n", "debranges_sum", "eq19_ratio_check",
    "density_verdict",
]

GROWTH_RATIO = 0.9       # last-decade increment ratio that still counts as growth
WITNESS_SLOPE_MIN = 0.05  # log-value gain per degree that counts as geometric


def mergelyan_integral_n(profile: HallProfile, measure,
                         p: Optional[float] = None) -> tuple[float, bool]:
    """Integrate log M^(n) from a profile against one of three measures.

    measure is a HarmonicMeasureEstimate (hit-sample average, with log M
    interpolated on the profile grid), the string "poisson" for
    dx/(1+x^2), or the string "benedicks" for dx/(1+|x|^(1+1/p)) (needs p).
    Quadrature measures integrate over the profile's x-range by trapezoid,
    so the profile grid must resolve the integrand (gap points included
    when the weight's gaps should contribute).

    Returns (value, window_flag); the flag is raised when the last
    component (or the outermost tenth of the x-range) carries more than 10%
    of the total, signaling window truncation effects.
    """
    xs, logs = profile.xs, profile.log_values
    if isinstance(measure, HarmonicMeasureEstimate):
        pts = measure.hit_points[~np.isnan(measure.hit_points)]
        comps = measure.hit_components[~np.isnan(measure.hit_points)]
        vals = np.interp(pts, xs, logs)
        total = float(np.sum(vals) / measure.n_samples)
        flag = False
        if len(measure.E) > 1 and total != 0:
            last = len(measure.E) - 1
            last_contrib = float(np.sum(vals[comps == last]) / measure.n_samples)
            flag = abs(last_contrib) > 0.1 * abs(total)
        return total, flag
    if measure == "poisson":
        dens = 1.0 / (1.0 + xs ** 2)
    elif measure == "benedicks":
        if p is None:
            raise ValueError("benedicks measure needs the exponent p")
        dens = 1.0 / (1.0 + np.abs(xs) ** (1.0 + 1.0 / p))
    else:
        raise ValueError(f"unknown measure {measure!r}")
    integrand = logs * dens
    total = float(np.trapezoid(integrand, xs))
    cut = xs[0] + 0.9 * (xs[-1] - xs[0])
    outer = xs >= cut
    outer_part = float(np.trapezoid(integrand[outer], xs[outer])) if np.count_nonzero(outer) > 1 else 0.0
    flag = abs(outer_part) > 0.1 * abs(total) if total != 0 else False
    return total, flag


@dataclass(frozen=True)
class DeBrangesSum:
    """Partial sums of sum_n W_r(lambda_n)/|F'(lambda_n)| and their verdict.

    decade_ratio compares the last tenth of the terms with the preceding
    tenth; a ratio below 0.9 suggests summability ("summable-suggested"),
    anything above suggests divergence.  Partial sums may overflow to inf
    for staircase weights; the ratio is then inf as well.
    """

    partial_sums: np.ndarray
    decade_ratio: float
    summable_suggested: bool
    K: int


def debranges_sum(W: Weight, F: KreinFunction, K: Optional[int] = None) -> DeBrangesSum:
    """Summability test for the weight against a candidate zero-type function.

    Terms are exp(log W_r(lambda_n) - log|f'(lambda_n)|), accumulated in
    zero order.  Zeros must lie where W is finite (inside E).
    """
    lam = np.asarray(F.zeros)
    derivs = np.asarray(F.derivs)
    if K is not None:
        lam, derivs = lam[:K], derivs[:K]
    if lam.size == 0:
        return DeBrangesSum(partial_sums=np.zeros(0), decade_ratio=0.0,
                            summable_suggested=True, K=0)
    logw = np.asarray(W.log_w(lam))
    with np.errstate(over="ignore"):
        terms = np.exp(logw - np.log(np.abs(derivs)))
        partial = np.cumsum(terms)
    k = lam.size
    d = max(1, k // 10)
    last = float(np.sum(terms[k - d:]))
    prev = float(np.sum(terms[k - 2 * d: k - d])) if k >= 2 * d else last
    if prev == 0.0:
        ratio = 0.0 if last == 0.0 else math.inf
    else:
        ratio = last / prev
    return DeBrangesSum(partial_sums=partial, decade_ratio=ratio,
                        summable_suggested=ratio < GROWTH_RATIO, K=k)


def eq19_ratio_check(W: Weight, degrees: Sequence[int], x_points: Sequence[float],
                     tol: float = 1e-6) -> list[dict]:
    """Ratios log M^(n)(x) / log W(x) for a log-convex closed-form weight.

    All degrees solve on one shared constraint grid (built for the largest
    degree, with the probe points pinned in), so feasibility at x is an
    explicit constraint and the nested-feasible-set monotonicity in n holds
    exactly, not just to refinement noise.  Each row carries the ratio,
    which stays below 1 + tol and is nondecreasing in n.  Requires
    log W(x) >= 1 at the probes so the ratio is well-scaled.
    """
    if W.model != "eq79":
        raise ValueError("the ratio check is defined for the closed-form even weight")
    from .extremal import build_constraint_grid
    n_max = max(int(n) for n in degrees)
    grid = build_constraint_grid(W, n_max)
    grid = np.unique(np.concatenate([grid, np.asarray([float(x) for x in x_points])]))
    rows = []
    for x in x_points:
        logw = float(W.log_w(x)[0])
        if logw < 1.0:
            raise ValueError(f"log W({x}) = {logw:.3g} < 1; pick probes farther out")
        for n in sorted(degrees):
            wit = hall_majorant_n(W, float(x), int(n), grid=grid, refine=False)
            rows.append({"x": float(x), "degree": int(n),
                         "log_m": wit.log_value, "log_w": logw,
                         "ratio": wit.log_value / logw})
    return rows


@dataclass(frozen=True)
class Verdict:
    label: str            # dense-suggested | not-dense-suggested | inconclusive
    evidence: tuple[str, ...]
    heuristic: bool = True


@dataclass
class DensityDiagnostics:
    """Per-degree integrals and witness growth for one (W, E) configuration."""

    degrees: tuple[int, ...]
    integral_omega: np.ndarray
    integral_poisson: np.ndarray
    integral_benedicks: Optional[np.ndarray]
    ab_sup: np.ndarray             # log+|P_n| integrated against dx/(1+x^2)
    witness_log_values: np.ndarray  # extremal log-values at the non-real probe
    probe: complex
    db: Optional[DeBrangesSum] = None
    window_flags: tuple[bool, ...] = ()

    def csv_rows(self) -> list[dict]:
        rows = []
        for i, n in enumerate(self.degrees):
            rows.append({
                "degree": n,
                "integral_omega": float(self.integral_omega[i]),
                "integral_poisson": float(self.integral_poisson[i]),
                "integral_benedicks": (float(self.integral_benedicks[i])
                                       if self.integral_benedicks is not None else float("nan")),
                "ab_sup": float(self.ab_sup[i]),
                "db_partial": (float(self.db.partial_sums[min(i, self.db.K - 1)])
                               if self.db is not None and self.db.K else float("nan")),
            })
        return rows


def _increment_ratio(values: np.ndarray) -> float:
    """Last increment over the previous one; large means growth persists."""
    if values.size < 3:
        return math.inf
    d_last = values[-1] - values[-2]
    d_prev = values[-2] - values[-3]
    if d_prev <= 0:
        return math.inf if d_last > 0 else 0.0
    return float(d_last / d_prev)


def _witness_slope(degrees: np.ndarray, logs: np.ndarray) -> float:
    """Average log-value gain per degree over the last half of the table."""
    k = max(2, logs.size // 2)
    dd = degrees[-k:]
    ll = logs[-k:]
    A = np.vstack([dd, np.ones_like(dd)]).T
    slope, _ = np.linalg.lstsq(A, ll, rcond=None)[0]
    return float(slope)


def density_verdict(diag: DensityDiagnostics, measure: str = "poisson") -> Verdict:
    """Heuristic density verdict over truncated diagnostics.

    dense-suggested: the chosen integral keeps growing (increment ratio
    >= 0.9) or witness values at the non-real probe grow geometrically.
    not-dense-suggested: the chosen integral plateaus and a convergent
    summability test is on record.  Anything else: inconclusive.  All
    verdicts are heuristics over truncations and say so.
    """
    if len(diag.degrees) < 5:
        raise ValueError("need diagnostics at five degrees or more")
    series = {
        "omega": diag.integral_omega,
        "poisson": diag.integral_poisson,
        "benedicks": diag.integral_benedicks,
    }[measure]
    if series is None:
        raise ValueError(f"diagnostics carry no {measure!r} integrals")

    evidence = []
    ratio = _increment_ratio(np.asarray(series))
    grows = ratio >= GROWTH_RATIO
    evidence.append(f"{measure} integral increment ratio {ratio:.3g} "
                    f"({'growth persists' if grows else 'plateauing'})")

    slope = _witness_slope(np.asarray(diag.degrees, dtype=float),
                           np.asarray(diag.witness_log_values))
    geometric = slope >= WITNESS_SLOPE_MIN
    evidence.append(f"witness log-value slope {slope:.3g} per degree at probe "
                    f"{diag.probe} ({'geometric growth' if geometric else 'saturating'})")

    db_conv = diag.db is not None and diag.db.summable_suggested
    if diag.db is not None:
        evidence.append(f"summability decade ratio {diag.db.decade_ratio:.3g} "
                        f"({'convergent' if db_conv else 'divergent'})")

    if grows or geometric:
        if db_conv and not grows:
            # convergent summability certificate outweighs probe growth alone
            return Verdict("not-dense-suggested", tuple(evidence))
        return Verdict("dense-suggested", tuple(evidence))
    if db_conv:
        return Verdict("not-dense-suggested", tuple(evidence))
    return Verdict("inconclusive", tuple(evidence))
