"""Vectorized walk-on-spheres sampler for planar domains slit along E.

The walker jumps from z to a uniform point on the circle of radius
min(dist(z, boundary), step_cap) and is absorbed once within eps_shell of an
absorbing set; absorbed positions are projected to the nearest boundary
point.  Three domain variants share the kernel:

* ``walk_to_slits``     -- C \\ E, absorbing on E only.  Planar Brownian
  motion is neighborhood-recurrent, so every walk terminates eventually; the
  discretized walk additionally uses an exact far-field shortcut: whenever
  |z| exceeds ``escape_radius`` the walker is moved in one step onto the
  circle |w| = escape_radius/2 (which encloses E), sampled from the hitting
  distribution of that circle (exterior Poisson kernel).  The shortcut is
  exact in law, so it introduces no bias, and it bounds excursion lengths.
* ``walk_in_disk``      -- {|w| < R} \\ E, absorbing on E or on |w| = R.
* ``walk_in_rectangle`` -- axis rectangle minus E, absorbing on E or on the
  rectangle sides (horizontal/vertical recorded separately).

Randomness: samples are processed in fixed-size blocks; block j draws from
an independent Philox counter stream (key = master seed, counter block = j).
Results are therefore bit-identical for a given (seed, N, block_size) no
matter how blocks would be scheduled, and aggregation uses only counts and
per-block ordered sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .intervals import IntervalSet, locate

__all__ = ["RandomWalkConfig", "HitSample", "WalkBatch", "sample_hit",
           "walk_to_slits", "walk_in_disk", "walk_in_rectangle",
           "NonterminationError"]

DEFAULT_BLOCK_SIZE = 1 << 16


class NonterminationError(RuntimeError):
    """Raised when the nonterminated fraction exceeds the validity cap."""

    def __init__(self, fraction: float, cap: float):
        super().__init__(
            f"nonterminated fraction {fraction:.4g} exceeds cap {cap:.4g}; "
            "increase max_steps or loosen eps_shell"
        )
        self.fraction = fraction
        self.cap = cap


@dataclass(frozen=True)
class RandomWalkConfig:
    """Discretization policy for the walk-on-spheres sampler.

    eps_shell: absorption distance to the slits.  Must stay below a quarter
        of the shortest component so hits resolve individual components.
    step_cap: maximum sphere radius.
    max_steps: per-walk step budget; exceeding it flags the sample as
        nonterminated (reported, never silently dropped).
    escape_radius: far-field shortcut trigger for the unbounded variant;
        must exceed twice the hull radius of E so the re-entry circle
        escape_radius/2 encloses E.
    seed: master seed for the Philox streams.
    block_size: number of walkers simulated in lockstep per block; part of
        the reproducibility contract (results depend on it, like on seed).
    """

    eps_shell: float
    step_cap: float = 1e4
    max_steps: int = 1_000_000
    escape_radius: float = 256.0
    seed: int = 0
    block_size: int = DEFAULT_BLOCK_SIZE

    def __post_init__(self):
        if self.eps_shell <= 0 or self.step_cap <= 0 or self.escape_radius <= 0:
            raise ValueError("eps_shell, step_cap, escape_radius must be positive")
        if self.max_steps < 1000:
            raise ValueError("max_steps must be at least 10^3")
        if self.block_size < 1:
            raise ValueError("block_size must be positive")

    @classmethod
    def for_set(cls, E: IntervalSet, seed: int = 0, **overrides) -> "RandomWalkConfig":
        """Defaults adapted to E: eps = 1e-6 * min component length, escape
        radius at four hull radii (at least 64)."""
        eps = 1e-6 * E.min_length
        esc = max(64.0, 4.0 * E.hull_radius)
        kw = dict(eps_shell=eps, escape_radius=esc, seed=seed)
        kw.update(overrides)
        return cls(**kw)

    def validate_for(self, E: IntervalSet) -> None:
        if self.eps_shell >= E.min_length / 4:
            raise ValueError("eps_shell must be below min component length / 4")

    def key_fields(self) -> dict:
        return {
            "eps_shell": self.eps_shell,
            "step_cap": self.step_cap,
            "max_steps": self.max_steps,
            "escape_radius": self.escape_radius,
            "seed": self.seed,
            "block_size": self.block_size,
        }


@dataclass(frozen=True)
class HitSample:
    """One walk outcome.  hit_point lies in E when terminated."""

    hit_point: float
    component_index: int
    steps: int
    terminated: bool


@dataclass
class WalkBatch:
    """Aggregated outcome of N walks from one source point.

    hit_points/hit_components/steps cover the terminated walks only, in
    sample order; n_nonterminated counts the rest.  side is only populated
    by the rectangle variant (0 = slit, 1 = horizontal, 2 = vertical) and by
    the disk variant (0 = slit, 3 = outer circle); for those variants
    hit_points holds the absorbed positions on the slits and NaN elsewhere.
    """

    n_samples: int
    hit_points: np.ndarray
    hit_components: np.ndarray
    steps: np.ndarray
    n_nonterminated: int
    n_escaped_jumps: int = 0
    side: Optional[np.ndarray] = None

    @property
    def nonterminated_fraction(self) -> float:
        return self.n_nonterminated / self.n_samples if self.n_samples else 0.0


def _block_rng(seed: int, block_index: int) -> np.random.Generator:
    # Each block owns a disjoint Philox counter range (2^128 draws apart).
    counter = np.array([0, 0, block_index, 0], dtype=np.uint64)
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(0)])
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def _reentry_points(x, y, radius, u):
    """Exact hitting point on |w| = radius for walkers at (x, y) outside.

    The hitting distribution of Brownian motion from z (|z| > radius) on the
    circle is the exterior Poisson kernel, i.e. a wrapped Cauchy law centered
    at arg z with parameter r = radius/|z|; sampled by a Moebius push of the
    uniform angle.
    """
    mod = np.hypot(x, y)
    r = radius / mod
    phi = np.arctan2(y, x)
    theta = phi + 2.0 * np.arctan(((1.0 - r) / (1.0 + r)) * np.tan(np.pi * (u - 0.5)))
    return radius * np.cos(theta), radius * np.sin(theta)


def _run_blocks(E: IntervalSet, z0: complex, n_samples: int, cfg: RandomWalkConfig,
                mode: str, rect=None, disk_radius: float = 0.0) -> WalkBatch:
    """Shared driver: simulate n_samples walks in blocks, lockstep per block."""
    cfg.validate_for(E)
    if E.distance(np.array([z0.real]), np.array([z0.imag]))[0] <= 0.0:
        raise ValueError("source point must lie off E")
    if mode == "free" and cfg.escape_radius < 2.0 * E.hull_radius:
        raise ValueError("escape_radius must be at least twice the hull radius of E")

    hit_points = np.full(n_samples, np.nan)
    hit_components = np.full(n_samples, -1, dtype=np.int64)
    steps_out = np.zeros(n_samples, dtype=np.int64)
    side_out = np.zeros(n_samples, dtype=np.int8) if mode in ("rect", "disk") else None
    nonterm = 0
    escaped_jumps = 0
    reentry_radius = cfg.escape_radius / 2.0

    if mode == "rect":
        rx_lo, rx_hi, ry_lo, ry_hi = rect

    n_blocks = (n_samples + cfg.block_size - 1) // cfg.block_size
    for bi in range(n_blocks):
        lo = bi * cfg.block_size
        hi = min(lo + cfg.block_size, n_samples)
        m = hi - lo
        rng = _block_rng(cfg.seed, bi)

        x = np.full(m, z0.real)
        y = np.full(m, z0.imag)
        alive = np.arange(m)
        nsteps = np.zeros(m, dtype=np.int64)

        for _ in range(cfg.max_steps):
            if alive.size == 0:
                break
            d_slit = E.distance(x, y)

            if mode == "free":
                d_bound = d_slit
            elif mode == "disk":
                d_outer = disk_radius - np.hypot(x, y)
                d_bound = np.minimum(d_slit, d_outer)
            else:  # rect
                d_outer_h = np.minimum(y - ry_lo, ry_hi - y)
                d_outer_v = np.minimum(x - rx_lo, rx_hi - x)
                d_outer = np.minimum(d_outer_h, d_outer_v)
                d_bound = np.minimum(d_slit, d_outer)

            eps_here = cfg.eps_shell
            if mode == "disk":
                absorbed = (d_slit <= eps_here) | (d_outer <= 1e-6 * disk_radius)
            elif mode == "rect":
                absorbed = d_bound <= eps_here
            else:
                absorbed = d_slit <= eps_here

            if np.any(absorbed):
                idx = alive[absorbed]
                ax, ay = x[absorbed], y[absorbed]
                if mode == "free":
                    proj, comp = E.project(ax)
                    hit_points[lo + idx] = proj
                    hit_components[lo + idx] = comp
                else:
                    on_slit = d_slit[absorbed] <= eps_here
                    proj, comp = E.project(ax)
                    hp = np.where(on_slit, proj, np.nan)
                    hc = np.where(on_slit, comp, -1)
                    sd = np.zeros(on_slit.size, dtype=np.int8)
                    if mode == "disk":
                        sd[~on_slit] = 3
                    else:
                        d_h = np.minimum(ay - ry_lo, ry_hi - ay)
                        d_v = np.minimum(ax - rx_lo, rx_hi - ax)
                        sd[~on_slit] = np.where(d_h[~on_slit] <= d_v[~on_slit], 1, 2)
                    hit_points[lo + idx] = hp
                    hit_components[lo + idx] = hc
                    side_out[lo + idx] = sd
                steps_out[lo + idx] = nsteps[absorbed]
                keep = ~absorbed
                x, y, alive, nsteps = x[keep], y[keep], alive[keep], nsteps[keep]
                if alive.size == 0:
                    break
                d_bound = d_bound[keep]

            u = rng.random(alive.size)
            if mode == "free":
                mod = np.hypot(x, y)
                far = mod > cfg.escape_radius
                if np.any(far):
                    escaped_jumps += int(np.count_nonzero(far))
                    x[far], y[far] = _reentry_points(x[far], y[far], reentry_radius, u[far])
                near = ~far
                r = np.minimum(d_bound[near], cfg.step_cap)
                theta = 2.0 * np.pi * u[near]
                x[near] += r * np.cos(theta)
                y[near] += r * np.sin(theta)
            else:
                r = np.minimum(d_bound, cfg.step_cap)
                theta = 2.0 * np.pi * u
                x += r * np.cos(theta)
                y += r * np.sin(theta)
            nsteps += 1

        if alive.size:
            nonterm += alive.size
            steps_out[lo + alive] = nsteps

    return WalkBatch(
        n_samples=n_samples,
        hit_points=hit_points,
        hit_components=hit_components,
        steps=steps_out,
        n_nonterminated=nonterm,
        n_escaped_jumps=escaped_jumps,
        side=side_out,
    )


def walk_to_slits(E: IntervalSet, z0: complex, n_samples: int,
                  cfg: RandomWalkConfig) -> WalkBatch:
    """N independent walks in C \\ E from z0, absorbed on E."""
    return _run_blocks(E, z0, n_samples, cfg, mode="free")


def walk_in_disk(E: IntervalSet, z0: complex, n_samples: int,
                 cfg: RandomWalkConfig, radius: float) -> WalkBatch:
    """Walks in {|w| < radius} \\ E, absorbed on E (side 0) or circle (side 3)."""
    if abs(z0) >= radius:
        raise ValueError("source must lie inside the disk")
    return _run_blocks(E, z0, n_samples, cfg, mode="disk", disk_radius=radius)


def walk_in_rectangle(E: IntervalSet, z0: complex, n_samples: int,
                      cfg: RandomWalkConfig,
                      rect: tuple[float, float, float, float]) -> WalkBatch:
    """Walks in an open rectangle (x_lo, x_hi, y_lo, y_hi) minus E.

    Absorption side codes: 0 = slit, 1 = horizontal side, 2 = vertical side.
    """
    rx_lo, rx_hi, ry_lo, ry_hi = rect
    if not (rx_lo < z0.real < rx_hi and ry_lo < z0.imag < ry_hi):
        raise ValueError("source must lie inside the rectangle")
    return _run_blocks(E, z0, n_samples, cfg, mode="rect", rect=rect)


def sample_hit(E: IntervalSet, z0: complex, cfg: RandomWalkConfig,
               sample_index: int = 0) -> HitSample:
    """Single walk from z0; deterministic in (cfg.seed, sample_index).

    The walk follows the same per-block stream as batch sampling, so a fixed
    seed always reproduces the same sample.
    """
    batch = _run_blocks(E, z0, sample_index + 1, cfg, mode="free")
    terminated = not math.isnan(batch.hit_points[sample_index])
    hp = float(batch.hit_points[sample_index]) if terminated else float("nan")
    comp = int(batch.hit_components[sample_index]) if terminated else -1
    if terminated:
        assert locate(E, hp).kind == "component"
    return HitSample(
        hit_point=hp,
        component_index=comp,
        steps=int(batch.steps[sample_index]),
        terminated=terminated,
    )
