"""Finite-degree extremal polynomials under a weight envelope on E.

``hall_majorant_n`` solves

    maximize P(z0)  over real polynomials of degree <= n
    subject to -W(x_j) <= P(x_j) <= W(x_j) on a constraint grid in E

by an exchange procedure: the primal simplex method applied to the dual of
this finite linear program.  A working set of n+1 (point, sign) pairs
determines the interpolating polynomial P(x_j) = sigma_j W(x_j); the most
violated constraint |P(x)| > W(x) on the grid enters the working set, a
ratio test picks the leaving pair (ties broken at the lowest grid index),
and at termination P is grid-feasible while the dual multipliers certify
optimality.  Any n+1 distinct grid points with the signs of their Lagrange
evaluation weights at z0 form a valid starting set.

Polynomials are represented in the Chebyshev basis scaled to the hull of
the constraint grid, and all weight data enters through log W with a
problem-wide rescaling, so staircase weights as large as exp(600) stay
solvable.  For refinable weights the grid is certified afterwards: local
maximizers of |P|/W inside each component are polished by golden-section
search and appended until no continuous violation remains.

Complex evaluation points are handled by maximizing Re(e^{i theta} P(z0))
over a grid of 64 phases with real coefficients; the result is a certified
lower bound for the complex-coefficient supremum and is labeled as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import chebyshev as ncheb

from .intervals import IntervalSet, locate
from .weights import Weight

__all__ = ["ExtremalWitness", "HallProfile", "ExchangeFailure",
           "hall_majorant_n", "hall_profile", "build_constraint_grid"]

FEAS_TOL = 1e-8
N_PHASES = 64
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class ExchangeFailure(RuntimeError):
    """Exchange did not reach a certified optimum; carries diagnostics."""


@dataclass(frozen=True)
class ExtremalWitness:
    """A degree-n extremal solution and its optimality certificate.

    ``coefficients`` are Chebyshev coefficients on ``basis_interval`` of the
    rescaled polynomial; the actual extremal polynomial is
    exp(scale_log) * sum_k coefficients[k] T_k(s(x)).  ``log_value`` is the
    log of the achieved maximum (finite even when the value overflows);
    ``value`` exponentiates it.  active_points lists the n+1 grid points
    where |P| touches W.
    """

    degree: int
    z0: complex
    log_value: float
    coefficients: np.ndarray
    basis_interval: tuple[float, float]
    scale_log: float
    active_points: np.ndarray
    active_signs: np.ndarray
    n_iterations: int
    phase: float = 0.0
    lower_bound_only: bool = False

    @property
    def value(self) -> float:
        return math.exp(self.log_value) if self.log_value < 709 else math.inf

    def eval_scaled(self, x) -> np.ndarray:
        """Rescaled polynomial (actual P = exp(scale_log) * this)."""
        lo, hi = self.basis_interval
        s = (2.0 * np.asarray(x, dtype=float) - lo - hi) / (hi - lo)
        return ncheb.chebval(s, self.coefficients)

    def log_abs(self, x) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.eval_scaled(x))) + self.scale_log

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree,
            "z0": [self.z0.real, self.z0.imag],
            "log_value": self.log_value,
            "coefficients": self.coefficients.tolist(),
            "basis_interval": list(self.basis_interval),
            "scale_log": self.scale_log,
            "active_points": self.active_points.tolist(),
            "active_signs": self.active_signs.tolist(),
            "phase": self.phase,
            "lower_bound_only": self.lower_bound_only,
        }


@dataclass
class HallProfile:
    """Pointwise finite-degree majorant values log M^(n) on an eval grid."""

    degree: int
    xs: np.ndarray
    log_values: np.ndarray
    weight: Weight


def build_constraint_grid(weight: Weight, n: int) -> np.ndarray:
    """Default constraint grid: per component, Chebyshev points of count
    max(16, 4(n+1)) plus the endpoints; grid-model weights use their table."""
    if weight.model == "grid":
        return np.asarray(sorted(weight.grid_x))
    pts = []
    count = max(16, 4 * (n + 1))
    lo, hi = weight.support.hull
    span = hi - lo
    for a, b in weight.support.components:
        # components far below the hull scale act as single constraint
        # points; clustering dozens of points there makes working sets
        # numerically singular without adding information
        if b - a <= 1e-10 * span:
            pts.append([0.5 * (a + b)])
            continue
        c_here = count if b - a > 1e-4 * span else min(count, 6)
        theta = (2.0 * np.arange(1, c_here + 1) - 1.0) / (2.0 * c_here) * math.pi
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        # rounding on very short components can spill past the endpoints
        pts.append(np.clip(mid + half * np.cos(theta), a, b))
        pts.append([a, b])
    return np.unique(np.concatenate([np.atleast_1d(p) for p in pts]))


# ---------------------------------------------------------------------------
# exchange core
# ---------------------------------------------------------------------------

def _features(xs: np.ndarray, lo: float, hi: float, n: int) -> np.ndarray:
    s = (2.0 * xs - lo - hi) / (hi - lo)
    return ncheb.chebvander(s, n)


def _features_point(z: complex, lo: float, hi: float, n: int) -> np.ndarray:
    s = (2.0 * z - lo - hi) / (hi - lo)
    t = np.empty(n + 1, dtype=complex)
    t[0] = 1.0
    if n >= 1:
        t[1] = s
    for k in range(2, n + 1):
        t[k] = 2.0 * s * t[k - 1] - t[k - 2]
    return t


def _initial_basis(m: int, n: int) -> np.ndarray:
    idx = np.unique(np.round(np.linspace(0, m - 1, n + 1)).astype(int))
    k = 0
    while idx.size < n + 1 and k < m:
        if k not in idx:
            idx = np.sort(np.append(idx, k))
        k += 1
    return idx


def _solve_exchange(V: np.ndarray, w: np.ndarray, t0: np.ndarray,
                    basis: np.ndarray, signs: Optional[np.ndarray],
                    tol: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Primal simplex on the dual program.

    V: (m, n+1) features; w: (m,) positive bounds; t0: objective functional.
    Returns (coefficients a, basis indices, basis signs, iterations).
    """
    m, dim = V.shape
    basis = basis.copy()
    if signs is None:
        # sign pattern of the representation t0 = sum nu_j t(x_j)
        nu = np.linalg.solve(V[basis].T, t0)
        signs = np.where(nu >= 0, 1.0, -1.0)
    else:
        signs = signs.copy()

    # deterministic per-index perturbation breaks degenerate ties (cycling)
    w = w * (1.0 + 1e-13 * np.arange(m))

    max_iter = 400 * (dim + 2)
    stall = 0
    last_obj = math.inf
    best = None  # least-violating iterate seen
    for it in range(max_iter):
        G = (V[basis] * signs[:, None]).T  # columns sigma_j t(x_j)
        try:
            a = np.linalg.solve(G.T, w[basis] * 1.0)
            mu = np.linalg.solve(G, t0)
        except np.linalg.LinAlgError as exc:
            raise ExchangeFailure(f"singular working set at iteration {it}") from exc

        vals = V @ a
        ratio = np.abs(vals) / w
        worst = float(np.max(ratio))
        if best is None or worst < best[0]:
            best = (worst, a, basis.copy(), signs.copy(), it)
        if stall < 40:
            enter = int(np.argmax(ratio))  # Dantzig: most violated
        else:
            viol = np.nonzero(ratio > 1.0 + tol)[0]  # Bland fallback
            enter = int(viol[0]) if viol.size else int(np.argmax(ratio))
        if ratio[enter] <= 1.0 + tol:
            return a, basis, signs, it
        if stall > 120 and best[0] <= 1.0 + 10.0 * tol:
            # degenerate churn within noise of the resolvable tolerance
            return best[1], best[2], best[3], it

        sig_e = 1.0 if vals[enter] >= 0 else -1.0
        g_e = sig_e * V[enter]
        d = np.linalg.solve(G, g_e)
        pos = d > 1e-14
        if not np.any(pos):
            raise ExchangeFailure("unbounded exchange direction (degenerate grid?)")
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(pos, np.maximum(mu, 0.0) / d, math.inf)
        theta = np.min(ratios)
        cands = np.nonzero(ratios <= theta + 1e-10 * (1.0 + abs(theta)))[0]
        leave = int(cands[np.argmin(basis[cands])])  # lowest grid index on ties

        obj = float(np.dot(w[basis], np.maximum(mu, 0.0)))
        stall = stall + 1 if obj >= last_obj - 1e-15 * (1.0 + abs(obj)) else 0
        last_obj = obj

        basis[leave] = enter
        signs[leave] = sig_e
    raise ExchangeFailure(f"exchange did not converge in {max_iter} iterations")


def _golden_max(fun, lo: float, hi: float, iters: int = 40) -> float:
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(iters):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = fun(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = fun(x1)
    return 0.5 * (lo + hi)


def _refine_points(weight: Weight, witness_eval, log_scale: float,
                   n: int, tol: float) -> list[float]:
    """Continuous violators of |P| <= W inside each component, all local
    maximizers polished by golden-section search."""
    out = []
    probes = max(64, 16 * (n + 1))
    thresh = math.log1p(tol)
    for a, b in weight.support.components:
        if b - a < 64.0 * math.ulp(max(abs(a), abs(b), 1.0)):
            continue  # sub-resolution slit: the endpoint constraints are all there is
        pad = min(1e-12 * (1.0 + abs(a) + abs(b)), 0.25 * (b - a))
        xs = np.linspace(a + pad, b - pad, probes)
        with np.errstate(divide="ignore"):
            excess = (np.log(np.abs(witness_eval(xs))) + log_scale) - weight.log_w(xs)

        def gain(x):
            v = abs(witness_eval(np.array([x]))[0])
            return (math.log(v) + log_scale if v > 0 else -math.inf) - float(weight.log_w(x)[0])

        interior = np.nonzero(
            (excess[1:-1] >= excess[:-2]) & (excess[1:-1] >= excess[2:])
            & (excess[1:-1] > thresh)
        )[0] + 1
        spots = list(interior)
        for edge in (0, probes - 1):
            if excess[edge] > thresh:
                spots.append(edge)
        for j in spots:
            lo = xs[max(j - 1, 0)]
            hi = xs[min(j + 1, probes - 1)]
            out.append(_golden_max(gain, lo, hi))
    return out


def hall_majorant_n(weight: Weight, z0: complex, n: int,
                    grid: Optional[np.ndarray] = None,
                    tol: float = FEAS_TOL,
                    refine: bool = True,
                    warm: Optional[np.ndarray] = None) -> ExtremalWitness:
    """Degree-n extremal value at z0 under the weight envelope.

    Real z0 (outside the hull or in a gap, or on the grid itself) is solved
    exactly as a finite linear program; by the symmetry P -> -P the two
    one-sided maxima coincide, so a single solve returns sup |P(z0)|.
    Complex z0 maximizes over 64 phases of Re(e^{i theta} P(z0)) and the
    witness is flagged ``lower_bound_only``.
    """
    z0 = complex(z0)
    if grid is None:
        grid = build_constraint_grid(weight, n)
    grid = np.asarray(grid, dtype=float)
    if grid.size >= 2:
        # drop near-duplicate points (relative to the hull) that would make
        # working sets singular; a 1e-11-relative neighbor adds nothing
        span = grid[-1] - grid[0]
        keep = np.concatenate([[True], np.diff(grid) > 1e-11 * max(span, 1e-300)])
        grid = grid[keep]
    if grid.size < n + 2:
        raise ValueError("constraint grid must contain at least n + 2 points")
    logw = np.asarray(weight.log_w(grid), dtype=float)
    scale_log = float(np.mean(logw))
    spread = float(np.max(logw) - np.min(logw))
    if spread > 30.0:
        raise ExchangeFailure(
            f"constraint values span exp({spread:.1f}); polynomial values at the "
            "small end cannot be resolved in float64 -- narrow the window or "
            "flatten the weight")
    # smallest constraint ratio resolvable given cancellation at the large end
    tol = max(tol, 4e-15 * (n + 1) * math.exp(spread))
    w = np.exp(logw - scale_log)
    lo, hi = float(grid[0]), float(grid[-1])
    if lo >= hi:
        raise ValueError("degenerate constraint hull")
    V = _features(grid, lo, hi, n)

    if z0.imag == 0.0:
        t0 = _features_point(z0.real, lo, hi, n).real
        phases = [(0.0, t0)]
    else:
        tc = _features_point(z0, lo, hi, n)
        phases = [(th, (np.exp(1j * th) * tc).real)
                  for th in np.linspace(0.0, 2.0 * math.pi, N_PHASES, endpoint=False)]

    best = None
    basis0 = warm if warm is not None else _initial_basis(grid.size, n)
    for theta, t0 in phases:
        basis = basis0.copy()
        # signs are always recomputed for the functional at hand: a reused
        # working set stays valid, reused signs would not
        try:
            a, basis, signs, iters = _solve_exchange(V, w, t0, basis, None, tol)
        except ExchangeFailure:
            if warm is None:
                raise
            a, basis, signs, iters = _solve_exchange(
                V, w, t0, _initial_basis(grid.size, n), None, tol)
        val = float(t0 @ a)
        if best is None or val > best[0]:
            best = (val, a, basis, signs, iters, theta)

    val, a, basis, signs, iters, theta = best
    if val <= 0:
        raise ExchangeFailure("nonpositive extremal value; ill-posed configuration")

    witness = ExtremalWitness(
        degree=n, z0=z0,
        log_value=math.log(val) + scale_log,
        coefficients=np.asarray(a),
        basis_interval=(lo, hi),
        scale_log=scale_log,
        active_points=grid[np.sort(basis)],
        active_signs=signs[np.argsort(basis)],
        n_iterations=iters,
        phase=theta,
        lower_bound_only=z0.imag != 0.0,
    )

    if refine and weight.refinable:
        for _ in range(16):
            extra = _refine_points(weight, witness.eval_scaled, witness.scale_log, n, tol)
            if not extra:
                return witness
            merged = np.unique(np.concatenate([grid, np.asarray(extra)]))
            if merged.size == grid.size:
                return witness  # violators collapse onto existing points
            grid = merged
            witness = hall_majorant_n(weight, z0, n, grid=grid, tol=tol, refine=False)
        raise ExchangeFailure("grid refinement did not certify within 16 rounds")
    return witness


def hall_profile(weight: Weight, n: int, eval_points: Sequence[float],
                 grid: Optional[np.ndarray] = None, tol: float = FEAS_TOL) -> HallProfile:
    """log M^(n) over eval_points, warm-starting consecutive solves.

    Eval points inside E are appended to the constraint grid so the
    feasibility bound M^(n)(x) <= W(x) holds at them by construction.
    """
    xs = np.asarray(sorted(float(x) for x in eval_points))
    if grid is None:
        grid = build_constraint_grid(weight, n)
    inside = [x for x in xs if locate(weight.support, x).kind == "component"]
    if inside and weight.refinable:
        grid = np.unique(np.concatenate([grid, np.asarray(inside)]))
    logs = np.empty(xs.size)
    warm = None
    for i, x in enumerate(xs):
        witness = hall_majorant_n(weight, x, n, grid=grid, tol=tol, warm=warm)
        logs[i] = witness.log_value
        # refinement may have solved on an enlarged grid; only reuse the
        # working set when every active point still indexes into ours
        bidx = np.searchsorted(grid, witness.active_points)
        bidx = np.clip(bidx, 0, grid.size - 1)
        if np.allclose(grid[bidx], witness.active_points) and np.unique(bidx).size == bidx.size:
            warm = bidx
        else:
            warm = None
    return HallProfile(degree=n, xs=xs, log_values=logs, weight=weight)
