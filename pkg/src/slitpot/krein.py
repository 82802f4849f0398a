"""Partial-fraction representations 1/f = sum c_n / (z - lambda_n).

A ``KreinFunction`` is the data (lambda_n, f'(lambda_n)) of a function whose
reciprocal expands into an absolutely convergent sum of simple fractions
with coefficients c_n = 1/f'(lambda_n).  Absolute convergence is only ever
observable on a truncation, so construction checks a geometric-tail
heuristic: the last decade of |c_n| (weighted by (1 + |lambda_n|^M) when a
moment order M is set) must contribute a vanishing share of the total.

``split_pm`` decomposes the sum by the position of each zero inside its
interval of E (left half vs right half) and returns the two partial
evaluators together with the real lower bound tau that the right-half sum
omits on R \\ E; the bound is computed from E's length floor (c, M):
tau = -(2/c) * sum |c_n| (1 + |lambda_n|^M).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .intervals import IntervalSet, locate
from .products import CanonicalProductSpec, ProductPoleError, derivative_at_zero

__all__ = ["KreinFunction", "SplitKrein", "krein_sum", "split_pm"]


def _kahan_sum(terms: np.ndarray) -> complex:
    """Error-compensated accumulation in a fixed order."""
    s = 0.0 + 0.0j
    c = 0.0 + 0.0j
    for t in terms:
        y = t - c
        tt = s + y
        c = (tt - s) - y
        s = tt
    return s


@dataclass(frozen=True)
class KreinFunction:
    """Zeros, derivative values and fraction coefficients c_n = 1/f'(lambda_n)."""

    zeros: tuple[float, ...]
    derivs: tuple[float, ...]
    moment_order: Optional[int] = None

    def __post_init__(self):
        if len(self.zeros) != len(self.derivs):
            raise ValueError("zeros and derivative values must pair up")
        if len(self.zeros) == 0:
            raise ValueError("need at least one zero")
        if any(a >= b for a, b in zip(self.zeros, self.zeros[1:])):
            raise ValueError("zeros must be strictly increasing")
        if any(d == 0 for d in self.derivs):
            raise ValueError("derivative values must be nonzero (simple zeros)")
        self._check_tail()

    def _check_tail(self):
        c = np.abs(np.asarray(self.coefficients))
        w = np.abs(np.asarray(self.zeros))
        if self.moment_order is not None:
            c = c * (1.0 + w ** self.moment_order)
        if c.size < 10:
            return  # too short for a tail verdict
        order = np.argsort(w)
        c_sorted = c[order]
        k = max(1, c.size // 10)
        tail_share = float(np.sum(c_sorted[-k:]) / np.sum(c_sorted))
        # geometric-tail heuristic: the last decade must not dominate
        if tail_share > 0.9:
            raise ValueError(
                f"fraction coefficients do not look absolutely summable "
                f"(last-decade share {tail_share:.2f})"
            )

    @property
    def coefficients(self) -> tuple[float, ...]:
        return tuple(1.0 / d for d in self.derivs)

    @classmethod
    def from_product(cls, spec: CanonicalProductSpec, K: Optional[int] = None,
                     moment_order: Optional[int] = None) -> "KreinFunction":
        """Build from the first K zeros of a canonical product."""
        lam = spec.zeros()
        K = lam.size if K is None else min(K, lam.size)
        derivs = [derivative_at_zero(spec, k) for k in range(1, K + 1)]
        return cls(zeros=tuple(lam[:K]), derivs=tuple(derivs),
                   moment_order=moment_order)


def krein_sum(F: KreinFunction, z: complex) -> complex:
    """sum c_n / (z - lambda_n), accumulated by increasing |lambda_n|.

    The order-fixed compensated accumulation makes the value reproducible
    across platforms.  Evaluation at a zero is a pole.
    """
    z = complex(z)
    lam = np.asarray(F.zeros)
    if np.any(lam == z):
        raise ProductPoleError(f"z = {z} is a pole of the fraction sum")
    c = np.asarray(F.coefficients)
    order = np.argsort(np.abs(lam), kind="stable")
    terms = (c[order] / (z - lam[order])).astype(complex)
    return _kahan_sum(terms)


@dataclass(frozen=True)
class SplitKrein:
    """Left/right-half partial sums of a single-sign fraction expansion."""

    g_plus: Callable[[complex], complex]
    g_minus: Callable[[complex], complex]
    tau: float
    sign_class: int  # +1: all c_n >= 0, -1: all c_n <= 0
    n_plus: int
    n_minus: int


def split_pm(F: KreinFunction, E: IntervalSet) -> SplitKrein:
    """Split the fraction sum by component halves of E.

    Each zero must lie in some component [a, b]; it belongs to the minus
    part when it sits in [a, (a+b)/2) and to the plus part otherwise.  The
    coefficients must form a single sign class.  Requires a length floor on
    E, from which tau = -(2/c) sum |c_n| (1 + |lambda_n|^M); for the
    nonnegative class the plus evaluator stays >= tau on R \\ E (and the
    mirrored bound holds for the nonpositive class).
    """
    if E.length_floor is None:
        raise ValueError("split needs an interval set with a length floor")
    c_floor, m_floor = E.length_floor
    lam = np.asarray(F.zeros)
    c = np.asarray(F.coefficients)
    if np.all(c >= 0):
        sign_class = 1
    elif np.all(c <= 0):
        sign_class = -1
    else:
        raise ValueError("coefficients must form a single sign class; split them first")

    in_plus = np.empty(lam.size, dtype=bool)
    for j, x in enumerate(lam):
        loc = locate(E, float(x))
        if loc.kind != "component":
            raise ValueError(f"zero {x} lies outside E")
        a, b = E.components[loc.index]
        in_plus[j] = x >= 0.5 * (a + b)

    m_exp = F.moment_order if F.moment_order is not None else m_floor
    tau = -(2.0 / c_floor) * float(np.sum(np.abs(c) * (1.0 + np.abs(lam) ** m_exp)))

    def _partial(mask: np.ndarray) -> Callable[[complex], complex]:
        lam_part, c_part = lam[mask], c[mask]
        order = np.argsort(np.abs(lam_part), kind="stable")
        lam_o, c_o = lam_part[order], c_part[order]

        def g(z: complex) -> complex:
            z = complex(z)
            if np.any(lam_o == z):
                raise ProductPoleError(f"z = {z} is a pole of the partial sum")
            return _kahan_sum((c_o / (z - lam_o)).astype(complex))

        return g

    return SplitKrein(
        g_plus=_partial(in_plus),
        g_minus=_partial(~in_plus),
        tau=tau,
        sign_class=sign_class,
        n_plus=int(np.count_nonzero(in_plus)),
        n_minus=int(np.count_nonzero(~in_plus)),
    )
