"""Canonical products over real zero lattices, with honest truncation tails.

A product spec fixes one of four zero models:

* ``explicit``  -- a finite increasing list of positive zeros (exact);
* ``power``     -- zeros n^(1/rho), n = 1..N, for rho in (0, 1/2]; the
  boundary value rho = 1/2 is the square lattice n^2 whose product has the
  closed form sin(pi sqrt z)/(pi sqrt z) and is used as a cross-check;
* ``square``    -- the even function built from a power product evaluated
  at z^2 (zeros +-n^(1/(2 rho)));
* ``sparse``    -- geometric zeros x1 * q^(k-1), q >= 2, where tails decay
  so fast that an explicitly summed extension reaches machine precision.

Evaluation returns the log-modulus and the unit phase of
prod_{n<=N} (1 - z/lambda_n) plus a tail correction estimated by
Euler-Maclaurin comparison of sum_{n>N} log(1 - z/lambda_n) with its
integral, together with a reported error bound.  Derivatives at the zeros
use the factored form f'(lambda_k) = (-1/lambda_k) prod_{n != k}
(1 - lambda_k/lambda_n) with exact sign tracking, in log space so that
super-exponentially large derivatives stay representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "CanonicalProductSpec", "ProductValue", "ProductPoleError", "TailBoundError",
    "eval_canonical_product", "derivative_at_zero", "log_derivative_at_zero",
    "hardy_ratio",
]

TAIL_SAFETY = 10.0


class ProductPoleError(ZeroDivisionError):
    """Evaluation at (or derivative bookkeeping across) a truncated zero."""


class TailBoundError(ValueError):
    """Tail not controllable at this truncation; request a larger N."""


@dataclass(frozen=True)
class CanonicalProductSpec:
    """Zero model + truncation + tail order for one canonical product."""

    model: str                       # explicit | power | square | sparse
    N: int = 10_000
    tail_order: int = 2
    rho: Optional[float] = None      # power/square lattices
    x1: Optional[float] = None       # sparse model: first zero
    q: Optional[float] = None        # sparse model: ratio
    explicit_zeros: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if self.model not in ("explicit", "power", "square", "sparse"):
            raise ValueError(f"unknown zero model {self.model!r}")
        if self.tail_order not in (0, 1, 2):
            raise ValueError("tail_order must be 0, 1 or 2")
        if self.N < 1:
            raise ValueError("truncation must be positive")
        if self.model in ("power", "square"):
            if self.rho is None or not 0.0 < self.rho <= 0.5:
                raise ValueError("power lattice needs rho in (0, 1/2]")
        if self.model == "sparse":
            if self.x1 is None or self.x1 <= 0:
                raise ValueError("sparse model needs a positive first zero")
            if self.q is None or self.q < 2:
                raise ValueError("sparse model needs ratio q >= 2")
            if self.N > 1000:
                raise ValueError("sparse truncation beyond 1000 zeros is meaningless")
        if self.model == "explicit":
            zs = self.explicit_zeros
            if not zs:
                raise ValueError("explicit model needs zeros")
            if any(z <= 0 for z in zs) or any(a >= b for a, b in zip(zs, zs[1:])):
                raise ValueError("explicit zeros must be positive and strictly increasing")

    def zeros(self) -> np.ndarray:
        """The truncated positive zero list lambda_1 < ... < lambda_N."""
        if self.model == "explicit":
            return np.asarray(self.explicit_zeros, dtype=float)
        if self.model in ("power", "square"):
            n = np.arange(1, self.N + 1, dtype=float)
            return n ** (1.0 / self.rho)
        k = np.arange(self.N, dtype=float)
        return self.x1 * self.q ** k

    def signed_zeros(self) -> np.ndarray:
        """Zeros of the evaluated function (symmetric pair list for square)."""
        lam = self.zeros()
        if self.model == "square":
            half = np.sqrt(lam)
            return np.concatenate([-half[::-1], half])
        return lam

    def to_text(self) -> str:
        if self.model in ("power", "square"):
            return f"model={self.model} rho={self.rho!r} N={self.N} tail={self.tail_order}"
        if self.model == "sparse":
            return f"model=sparse x1={self.x1!r} q={self.q!r} N={self.N} tail={self.tail_order}"
        zs = ",".join(repr(z) for z in self.explicit_zeros)
        return f"model=explicit zeros={zs}"

    @classmethod
    def from_text(cls, text: str) -> "CanonicalProductSpec":
        kv = dict(tok.split("=", 1) for tok in text.split())
        model = kv["model"]
        if model in ("power", "square"):
            return cls(model=model, rho=float(kv["rho"]), N=int(kv.get("N", 10_000)),
                       tail_order=int(kv.get("tail", 2)))
        if model == "sparse":
            return cls(model="sparse", x1=float(kv["x1"]), q=float(kv["q"]),
                       N=int(kv.get("N", 60)), tail_order=int(kv.get("tail", 2)))
        zeros = tuple(float(z) for z in kv["zeros"].split(","))
        return cls(model="explicit", explicit_zeros=zeros)


@dataclass(frozen=True)
class ProductValue:
    """log|f(z)|, unit phase of f(z), and a bound on the log-scale error."""

    log_modulus: float
    phase: complex
    error_bound: float

    @property
    def value(self) -> complex:
        return self.phase * math.exp(self.log_modulus)


# ---------------------------------------------------------------------------
# tail machinery for the power lattice
# ---------------------------------------------------------------------------

def _power_tail_series(z: complex, a: float, inv_rho: float):
    """Series data for h(x) = log(1 - z x^(-1/rho)) at x = a.

    Returns (integral int_a^inf h, h(a), h'(a), |h''(a)|) computed from the
    expansion log(1-w) = -sum w^k/k, valid for |z| a^(-1/rho) < 1/2.
    """
    r = abs(z) * a ** (-inv_rho)
    if r >= 0.5:
        raise TailBoundError(
            f"|z|/lambda_(N+1) = {r:.3g} >= 1/2; increase the truncation N"
        )
    integral = 0.0 + 0.0j
    h = 0.0 + 0.0j
    hp = 0.0 + 0.0j
    hpp_mag = 0.0
    zk = 1.0 + 0.0j
    for k in range(1, 200):
        zk *= z
        xk = a ** (-k * inv_rho)
        term_h = -zk * xk / k
        h += term_h
        integral += term_h * a / (k * inv_rho - 1.0)
        hp += zk * inv_rho * xk / a
        hpp_mag += abs(zk) * inv_rho * (k * inv_rho + 1.0) * xk / (a * a)
        if abs(term_h) < 1e-18 * (1.0 + abs(h)):
            break
    return integral, h, hp, hpp_mag


def _power_tail(z: complex, spec: CanonicalProductSpec) -> tuple[complex, float]:
    """Euler-Maclaurin tail sum_{n>N} log(1 - z/n^(1/rho)) and its bound."""
    inv_rho = 1.0 / spec.rho
    a = float(spec.N + 1)
    integral, h, hp, hpp_mag = _power_tail_series(z, a, inv_rho)
    if spec.tail_order == 0:
        # no correction; bound the whole tail by sum of magnitudes
        r = abs(z) * a ** (-inv_rho)
        mag = abs(z) / (1.0 - r) * (spec.N ** (1.0 - inv_rho)) / (inv_rho - 1.0)
        return 0.0 + 0.0j, TAIL_SAFETY * mag
    if spec.tail_order == 1:
        return integral + 0.5 * h, TAIL_SAFETY * abs(hp)
    return integral + 0.5 * h - hp / 12.0, TAIL_SAFETY * hpp_mag


def _sparse_tail(z: complex, spec: CanonicalProductSpec) -> tuple[complex, float]:
    """Tail for geometric zeros: explicitly summed extension (machine exact)."""
    if spec.tail_order == 0:
        x_next = spec.x1 * spec.q ** spec.N
        if abs(z) / x_next >= 0.5:
            raise TailBoundError("geometric tail not controlled; increase N")
        return 0.0 + 0.0j, TAIL_SAFETY * 2.0 * abs(z) / x_next
    total = 0.0 + 0.0j
    for k in range(spec.N, spec.N + 256):
        x = spec.x1 * spec.q ** k
        if not math.isfinite(x):
            break
        w = z / x
        if abs(w) >= 1.0:
            raise TailBoundError("geometric tail not controlled; increase N")
        term = np.log(1.0 - w)
        total += term
        if abs(term) < 1e-19:
            break
    return total, 1e-15 * (1.0 + abs(total))


def _tail(z: complex, spec: CanonicalProductSpec) -> tuple[complex, float]:
    if spec.model == "explicit":
        return 0.0 + 0.0j, 0.0
    if spec.model == "sparse":
        return _sparse_tail(z, spec)
    return _power_tail(z, spec)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def eval_canonical_product(spec: CanonicalProductSpec, z: complex) -> ProductValue:
    """log-modulus and unit phase of the product at z, with tail correction.

    The empty-product value at z = 0 is exactly 1.  Evaluation exactly on a
    truncated zero signals a pole.
    """
    z = complex(z)
    if spec.model == "square":
        inner = eval_canonical_product(_as_power(spec), z * z)
        return inner
    if z == 0:
        return ProductValue(0.0, 1.0 + 0.0j, 0.0)
    lam = spec.zeros()
    factors = 1.0 - z / lam
    if np.any(factors == 0):
        raise ProductPoleError(f"z = {z} is a zero of the truncated product")
    logs = np.log(factors.astype(complex))
    head = complex(np.sum(logs))
    tail, bound = _tail(z, spec)
    total = head + tail
    # float accumulation over N terms
    bound += 1e-15 * lam.size * (1.0 + abs(head))
    phase = np.exp(1j * total.imag)
    return ProductValue(float(total.real), complex(phase), float(bound))


def _as_power(spec: CanonicalProductSpec) -> CanonicalProductSpec:
    return CanonicalProductSpec(model="power", rho=spec.rho, N=spec.N,
                                tail_order=spec.tail_order)


def log_derivative_at_zero(spec: CanonicalProductSpec, k: int) -> tuple[float, int]:
    """(log|f'(lambda_k)|, sign) at the k-th zero (1-based), exactly signed.

    Signs alternate: with positive increasing zeros, k-1 factors of the
    product prod_{n != k} (1 - lambda_k/lambda_n) are negative and the
    leading -1/lambda_k flips once more, so sign = (-1)^k.
    """
    if spec.model == "square":
        # F(z) = B(z^2): F'(+-mu_k) = +-2 mu_k B'(mu_k^2)
        logmag, sign = log_derivative_at_zero(_as_power(spec), k)
        mu = spec.zeros()[k - 1] ** 0.5
        return logmag + math.log(2.0 * mu), sign
    lam = spec.zeros()
    if not 1 <= k <= lam.size:
        raise ProductPoleError(f"zero index {k} outside truncation 1..{lam.size}")
    lk = lam[k - 1]
    others = np.delete(lam, k - 1)
    ratios = 1.0 - lk / others
    logmag = float(np.sum(np.log(np.abs(ratios)))) - math.log(lk)
    if spec.model != "explicit":
        tail, bound = _tail(complex(lk), spec)
        if abs(tail.imag) > 1e-9:
            raise TailBoundError("tail correction not real at a real zero")
        logmag += tail.real
    sign = -1 if k % 2 else 1
    return logmag, sign


def derivative_at_zero(spec: CanonicalProductSpec, k: int) -> float:
    """f'(lambda_k) as a float; raises on overflow (use the log form then)."""
    logmag, sign = log_derivative_at_zero(spec, k)
    if logmag > 700.0:
        raise OverflowError(
            f"|f'(lambda_{k})| = exp({logmag:.1f}) overflows float64; "
            "use log_derivative_at_zero"
        )
    return sign * math.exp(logmag)


# ---------------------------------------------------------------------------
# derivative asymptotics on the power lattice
# ---------------------------------------------------------------------------

def hardy_ratio(rho: float, n_values: Sequence[int], N: int = 10_000,
                tail_order: int = 2) -> list[dict]:
    """Normalized derivative ratios on the power lattice.

    r(n) = |B'(lambda)| / (lambda^(rho - 3/2) exp(pi cot(pi rho) lambda^rho))
    with lambda = n^(1/rho).  A flat tail of r certifies the derivative
    asymptotics; rho = 1/2 runs through the closed form
    B'(k^2) = (-1)^k / (2 k^2) where cot vanishes and r(n) = 1/2 exactly.

    Rows carry n, lambda, log|B'|, sign, ratio, and a tail-pollution flag.
    """
    if not 0.0 < rho <= 0.5:
        raise ValueError("rho must lie in (0, 1/2]")
    rows = []
    if rho == 0.5:
        for n in n_values:
            lam = float(n) ** 2
            log_deriv = -math.log(2.0 * lam)
            ratio = math.exp(log_deriv - (rho - 1.5) * math.log(lam))
            rows.append({"n": int(n), "lambda": lam, "log_deriv": log_deriv,
                         "sign": -1 if n % 2 else 1, "ratio": ratio,
                         "tail_polluted": False})
        return rows
    if max(n_values) * 50 > N:
        raise TailBoundError("need N >> max n for a trustworthy tail")
    spec = CanonicalProductSpec(model="power", rho=rho, N=N, tail_order=tail_order)
    cot = math.cos(math.pi * rho) / math.sin(math.pi * rho)
    for n in n_values:
        lam = float(n) ** (1.0 / rho)
        log_deriv, sign = log_derivative_at_zero(spec, int(n))
        log_ratio = log_deriv - (rho - 1.5) * math.log(lam) - math.pi * cot * lam ** rho
        _, bound = _power_tail(complex(lam), spec)
        rows.append({"n": int(n), "lambda": lam, "log_deriv": log_deriv,
                     "sign": sign, "ratio": math.exp(log_ratio),
                     "tail_polluted": bound > 1e-3})
    return rows
