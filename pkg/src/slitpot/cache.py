"""Hit-sample caches: walk outcomes persisted as plain CSV.

A cache entry is keyed by an exact digest of the serialized interval set
(hex floats, so a 1e-12 endpoint perturbation changes the key), the source
point, and the discretization fields eps_shell / step_cap / max_steps /
escape_radius / block_size and the seed.  Files carry the key and the
sample count in their header; a row-count mismatch marks the file corrupt
and forces a refresh.  Floats round-trip exactly through repr.
"""

from __future__ import annotations

import hashlib
import os
from pathlib import Path
from typing import Optional

import numpy as np

from .intervals import IntervalSet
from .wos import RandomWalkConfig, WalkBatch

__all__ = ["cache_key", "cache_dir", "store_batch", "load_batch", "cached_walk"]

ENV_CACHE_DIR = "SLITPOT_CACHE_DIR"


def cache_key(E: IntervalSet, z0: complex, cfg: RandomWalkConfig) -> str:
    """Stable digest of the exact sampling inputs."""
    z0 = complex(z0)
    parts = [
        E.canonical_key(),
        z0.real.hex(), z0.imag.hex(),
        float(cfg.eps_shell).hex(), float(cfg.step_cap).hex(),
        str(cfg.max_steps), float(cfg.escape_radius).hex(),
        str(cfg.seed), str(cfg.block_size),
    ]
    return hashlib.sha256("|".join(parts).encode()).hexdigest()[:32]


def cache_dir(out_dir: Optional[str] = None) -> Path:
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    base = Path(out_dir) if out_dir else Path(".")
    return base / "cache"


def store_batch(directory: Path, key: str, E: IntervalSet, z0: complex,
                cfg: RandomWalkConfig, batch: WalkBatch) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"walks-{key}.csv"
    lines = [
        f"# E-hash={key}, z0={complex(z0)!r}, eps={cfg.eps_shell!r}, "
        f"seed={cfg.seed}, N={batch.n_samples}",
        "hit_point,component,steps",
    ]
    for hp, comp, st in zip(batch.hit_points, batch.hit_components, batch.steps):
        lines.append(f"{hp!r},{comp},{st}")
    path.write_text("\n".join(lines) + "\n")
    return path


def load_batch(directory: Path, key: str) -> Optional[WalkBatch]:
    """Load a cached batch; None on miss or on a corrupt (truncated) file."""
    path = directory / f"walks-{key}.csv"
    if not path.exists():
        return None
    lines = path.read_text().splitlines()
    if len(lines) < 2 or not lines[0].startswith("#"):
        return None
    header = lines[0]
    try:
        n_declared = int(header.rsplit("N=", 1)[1])
    except (IndexError, ValueError):
        return None
    rows = lines[2:]
    if len(rows) != n_declared:
        return None  # corrupted: row count mismatch
    hit = np.empty(n_declared)
    comp = np.empty(n_declared, dtype=np.int64)
    steps = np.empty(n_declared, dtype=np.int64)
    try:
        for i, row in enumerate(rows):
            a, b, c = row.split(",")
            hit[i] = float(a)
            comp[i] = int(b)
            steps[i] = int(c)
    except ValueError:
        return None
    nonterm = int(np.count_nonzero(np.isnan(hit)))
    return WalkBatch(n_samples=n_declared, hit_points=hit, hit_components=comp,
                     steps=steps, n_nonterminated=nonterm)


def cached_walk(E: IntervalSet, z0: complex, n_samples: int, cfg: RandomWalkConfig,
                policy: str = "off", directory: Optional[Path] = None) -> WalkBatch:
    """walk_to_slits with a use/refresh/off cache policy."""
    from .wos import walk_to_slits

    if policy not in ("use", "refresh", "off"):
        raise ValueError("cache policy must be use, refresh or off")
    if policy == "off":
        return walk_to_slits(E, z0, n_samples, cfg)
    directory = directory if directory is not None else cache_dir()
    key = cache_key(E, z0, cfg) + f"-{n_samples}"
    if policy == "use":
        batch = load_batch(directory, key)
        if batch is not None:
            return batch
    batch = walk_to_slits(E, z0, n_samples, cfg)
    store_batch(directory, key, E, z0, cfg, batch)
    return batch
