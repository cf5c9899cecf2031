"""Finite-blocklength normal approximation for the binary-input AWGN
channel: capacity, dispersion, achievable rate, and required SNR.

All rates are in bits (base-2 logs).  C and V come from Gauss-Hermite
quadrature of the information density of the symmetric channel; the
Q-function uses erfc and its inverse is found by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channel import snr_db_to_sigma

GH_ORDER = 128

_LOG2E = math.log2(math.e)


def q_function(x: float) -> float:
    """Gaussian tail Q(x) = erfc(x / sqrt(2)) / 2."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def q_inverse(p: float) -> float:
    """x with Q(x) = p, by bisection; valid for p in (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    lo, hi = -40.0, 40.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if q_function(mid) > p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=8)
def _gh_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    return nodes, weights


def _information_density(z: np.ndarray, sigma: float) -> np.ndarray:
    # i(+1; y) for y = 1 + z, in bits; by symmetry X = +1 suffices.
    t = -2.0 * (1.0 + z) / (sigma * sigma)
    return 1.0 - np.logaddexp(0.0, t) * _LOG2E


def biawgn_c_v(sigma: float, order: int = GH_ORDER) -> tuple[float, float]:
    """Capacity C (bits/use) and dispersion V (bits^2/use) at noise sigma.

    Gauss-Hermite quadrature over z ~ Normal(0, sigma^2); V = E[i^2] - C^2.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    nodes, weights = _gh_nodes(order)
    z = math.sqrt(2.0) * sigma * nodes
    dens = _information_density(z, sigma)
    w = weights / math.sqrt(math.pi)
    c = float(np.dot(w, dens))
    second = float(np.dot(w, dens * dens))
    v = max(second - c * c, 0.0)
    return c, v


def na_rate(n_block: int, sigma: float, pe: float) -> float:
    """Normal-approximation rate C - sqrt(V/N) Q^-1(Pe) + log2(N)/(2N)."""
    if not 0.0 < pe < 1.0:
        raise ValueError(f"Pe must be in (0, 1), got {pe}")
    c, v = biawgn_c_v(sigma)
    return c - math.sqrt(v / n_block) * q_inverse(pe) + math.log2(n_block) / (2 * n_block)


@dataclass(frozen=True)
class CapacityPoint:
    sigma: float
    c: float
    v: float
    pe: float
    n_block: int
    r_na: float


def capacity_point(n_block: int, es_n0_db: float, pe: float) -> CapacityPoint:
    sigma = snr_db_to_sigma(es_n0_db)
    c, v = biawgn_c_v(sigma)
    return CapacityPoint(
        sigma=sigma,
        c=c,
        v=v,
        pe=pe,
        n_block=n_block,
        r_na=na_rate(n_block, sigma, pe),
    )


SNR_BRACKET_DB = (-10.0, 20.0)


def na_required_snr(n_block: int, rate: float, pe: float, tol_db: float = 1e-4) -> float:
    """Es/N0 (dB) at which the normal-approximation rate equals `rate`.

    Bisection over the SNR bracket; na_rate is increasing in SNR there.
    """
    if not 0.0 < rate < 1.0:
        raise ValueError(f"rate must be in (0, 1), got {rate}")
    lo, hi = SNR_BRACKET_DB
    f_lo = na_rate(n_block, snr_db_to_sigma(lo), pe) - rate
    f_hi = na_rate(n_block, snr_db_to_sigma(hi), pe) - rate
    if f_lo > 0.0 or f_hi < 0.0:
        raise ValueError(
            f"rate {rate} not bracketed by Es/N0 in {SNR_BRACKET_DB} dB "
            f"(rate range [{f_lo + rate:.6f}, {f_hi + rate:.6f}])"
        )
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if na_rate(n_block, snr_db_to_sigma(mid), pe) < rate:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
