"""Gaussian-approximation construction of the information set.

Under GA the LLR of each synthetic channel is Normal(m, 2m); polarization
maps a channel with mean m to a pair (check(m), 2m).  The check update
uses the standard two-piece approximation of

    phi(m) = 1 - E[tanh(l/2)],  l ~ Normal(m, 2m)

with a polynomial exponent for small argument and a linear (exponential
form) exponent for large argument; the crossover is where the two pieces
meet, which keeps phi continuous and strictly decreasing:

    phi(x) = exp(0.0116 x^2 - 0.4212 x)    for 0 <= x <= 7.0633
    phi(x) = exp(-0.2944 x - 0.3169)       for x > 7.0633

phi^-1 is found by bisection (log domain) to 1e-9 absolute tolerance on
the mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PHI_POLY_C2 = 0.0116
PHI_POLY_C1 = -0.4212
PHI_EXP_C1 = -0.2944
PHI_EXP_C0 = -0.3169
# larger root of "poly exponent == linear exponent" (~7.0633); evaluating
# it exactly keeps phi continuous and strictly decreasing at the seam
PHI_CROSSOVER = (
    -(PHI_POLY_C1 - PHI_EXP_C1)
    + math.sqrt((PHI_POLY_C1 - PHI_EXP_C1) ** 2 + 4.0 * PHI_POLY_C2 * PHI_EXP_C0)
) / (2.0 * PHI_POLY_C2)

PHI_INV_TOL = 1e-9

# Below this, phi(m) underflows and the check update is evaluated fully in
# the log domain with 1 - (1 - phi)^2 ~= 2 phi.
_PHI_TINY = 1e-300


def _log_phi(x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x <= PHI_CROSSOVER:
        return PHI_POLY_C2 * x * x + PHI_POLY_C1 * x
    return PHI_EXP_C1 * x + PHI_EXP_C0


def phi(x: float) -> float:
    return math.exp(_log_phi(x))


def check_mean(m: float) -> float:
    """GA mean through a check combination: phi^-1(1 - (1 - phi(m))^2)."""
    if m <= 0.0:
        return 0.0
    lp = _log_phi(m)
    p = math.exp(lp)
    if p > _PHI_TINY:
        log_target = lp + math.log(2.0 - p)
    else:
        log_target = lp + math.log(2.0)
    lo, hi = 0.0, m
    while hi - lo > PHI_INV_TOL:
        mid = 0.5 * (lo + hi)
        if _log_phi(mid) > log_target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ReliabilityProfile:
    """GA mean LLR of each synthetic channel, natural u-index order."""

    llr_means: np.ndarray
    design_sigma: float


def ga_profile(n: int, design_sigma: float) -> ReliabilityProfile:
    """GA means for all N = 2^n synthetic channels at noise design_sigma.

    Root mean is 2/sigma^2; index i's value applies the check/double
    updates along the binary expansion of i (MSB first, 1 = double).
    """
    if design_sigma <= 0:
        raise ValueError("design_sigma must be positive")
    means = np.array([2.0 / (design_sigma * design_sigma)])
    for _ in range(n):
        nxt = np.empty(2 * means.size)
        nxt[0::2] = [check_mean(m) for m in means]
        nxt[1::2] = 2.0 * means
        means = nxt
    means.setflags(write=False)
    return ReliabilityProfile(llr_means=means, design_sigma=design_sigma)


def ga_construct(n: int, k: int, design_sigma: float) -> tuple[int, ...]:
    """The K most reliable u-positions under GA, ties toward the larger
    index; sorted ascending."""
    N = 1 << n
    if not 0 < k <= N:
        raise ValueError(f"need 0 < K <= N, got K={k}, N={N}")
    profile = ga_profile(n, design_sigma)
    # stable ascending sort: among equal means the larger index lands later
    # and therefore survives the top-K cut
    order = np.argsort(profile.llr_means, kind="stable")
    return tuple(sorted(int(i) for i in order[-k:]))
