"""LLR-based successive cancellation decoding: SC, SCL, CRC-aided
selection (CA-SCL), and adaptive list doubling (ADSCL).

Path metric: a path pays |alpha| whenever its decision contradicts the
sign of the decision LLR, otherwise nothing; frozen bits are forced to 0
under the same rule.  LLR combining is min-sum for the check (f) side and
exact for the g side, the regime in which that metric is stated.

The decoder walks u in natural index order; the bit-reversal in
c = (uB)G is absorbed by permuting the channel LLRs once on entry.

Workspaces are materialized lazily: at a split, both children of a path
are scored from the parent's decision LLR alone, pruning happens on the
scores, and only surviving children get (copies of) the parent workspace.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .codes import CodeSpec, bit_reversal
from .crc import syndrome_matrix


@njit(cache=True)
def _scl_kernel(alpha_perm, frozen, list_size):
    """Core SCL sweep.  Returns (uhat, pm, count) with the first `count`
    rows holding the survivors sorted by path metric ascending; pruning
    ties break toward the lower candidate index (parent-major, bit 0
    first)."""
    N = alpha_perm.shape[0]
    n = 0
    while (1 << n) < N:
        n += 1

    # level d of the LLR tree occupies off[d] .. off[d] + (N >> d)
    off = np.zeros(n + 2, dtype=np.int64)
    for d in range(n + 1):
        off[d + 1] = off[d] + (N >> d)
    # stash slot for a completed left child at depth d (1..n)
    soff = np.zeros(n + 2, dtype=np.int64)
    for d in range(1, n + 1):
        soff[d + 1] = soff[d] + (N >> d)

    n_info = 0
    for i in range(N):
        if not frozen[i]:
            n_info += 1
    cap = list_size
    if n_info < 62 and (1 << n_info) < cap:
        cap = 1 << n_info

    work = off[n + 1]  # 2N - 1
    llr = np.zeros((cap, work), dtype=np.float64)
    llr2 = np.zeros((cap, work), dtype=np.float64)
    stash = np.zeros((cap, N), dtype=np.uint8)
    stash2 = np.zeros((cap, N), dtype=np.uint8)
    uhat = np.zeros((cap, N), dtype=np.uint8)
    uhat2 = np.zeros((cap, N), dtype=np.uint8)
    pm = np.zeros(cap, dtype=np.float64)
    scratch = np.zeros(N, dtype=np.uint8)

    cand_pm = np.zeros(2 * cap, dtype=np.float64)

    llr[0, : off[1]] = alpha_perm
    count = 1

    for i in range(N):
        # --- LLR updates down to the leaf ---------------------------------
        if i == 0:
            d_start = 0
        else:
            k = 0
            while ((i >> k) & 1) == 0:
                k += 1
            dg = n - k  # right child at this depth: g-update
            m = N >> dg
            for j in range(count):
                pa = off[dg - 1]
                de = off[dg]
                sb = soff[dg]
                for t in range(m):
                    a = llr[j, pa + t]
                    b = llr[j, pa + m + t]
                    if stash[j, sb + t]:
                        llr[j, de + t] = b - a
                    else:
                        llr[j, de + t] = b + a
            d_start = dg
        for d in range(d_start, n):
            m2 = N >> (d + 1)
            for j in range(count):
                pa = off[d]
                de = off[d + 1]
                for t in range(m2):
                    a = llr[j, pa + t]
                    b = llr[j, pa + m2 + t]
                    sgn = 1.0
                    if a < 0:
                        sgn = -sgn
                        a = -a
                    if b < 0:
                        sgn = -sgn
                        b = -b
                    llr[j, de + t] = sgn * (a if a < b else b)

        # --- decision / split ---------------------------------------------
        leaf = off[n]
        if frozen[i]:
            for j in range(count):
                x = llr[j, leaf]
                if x < 0.0:
                    pm[j] -= x
                uhat[j, i] = 0
        else:
            n_cand = 2 * count
            for p in range(count):
                x = llr[p, leaf]
                pen = x if x >= 0.0 else -x
                cand_pm[2 * p] = pm[p] + (pen if x < 0.0 else 0.0)
                cand_pm[2 * p + 1] = pm[p] + (pen if x > 0.0 else 0.0)
            keep = n_cand if n_cand <= cap else cap
            order = np.argsort(cand_pm[:n_cand], kind="mergesort")
            for jj in range(keep):
                cid = order[jj]
                p = cid >> 1
                b = cid & 1
                for t in range(work):
                    llr2[jj, t] = llr[p, t]
                for t in range(N):
                    stash2[jj, t] = stash[p, t]
                    uhat2[jj, t] = uhat[p, t]
                uhat2[jj, i] = b
                pm[jj] = cand_pm[cid]
            tmp = llr
            llr = llr2
            llr2 = tmp
            tmpb = stash
            stash = stash2
            stash2 = tmpb
            tmpb = uhat
            uhat = uhat2
            uhat2 = tmpb
            count = keep

        # --- partial-sum feedback ------------------------------------------
        for j in range(count):
            scratch[0] = uhat[j, i]
            m = 1
            d = n
            while d >= 1 and ((i >> (n - d)) & 1) == 1:
                sb = soff[d]
                for t in range(m):
                    left = stash[j, sb + t]
                    scratch[m + t] = scratch[t]
                    scratch[t] = left ^ scratch[t]
                m <<= 1
                d -= 1
            if d >= 1:
                sb = soff[d]
                for t in range(m):
                    stash[j, sb + t] = scratch[t]

    order = np.argsort(pm[:count], kind="mergesort")
    uhat_out = np.zeros((count, N), dtype=np.uint8)
    pm_out = np.zeros(count, dtype=np.float64)
    for jj in range(count):
        for t in range(N):
            uhat_out[jj, t] = uhat[order[jj], t]
        pm_out[jj] = pm[order[jj]]
    return uhat_out, pm_out, count


@dataclass(frozen=True)
class ListResult:
    """Survivors of one SCL sweep, sorted by path metric ascending."""

    survivors_u: np.ndarray  # (P, N) uint8
    pms: np.ndarray  # (P,) float64
    passed: Optional[int] = None  # first CRC-valid survivor, where checked


@dataclass(frozen=True)
class AdaptiveResult:
    """Outcome of ADSCL: either a decoded u, or the exhausted survivors."""

    decoded_u: Optional[np.ndarray]
    survivors: Optional[ListResult]
    rounds: tuple[int, ...]
    node_count: float


def _check_survivors(result_u: np.ndarray, spec: CodeSpec) -> Optional[int]:
    """Index of the first (lowest-pm) CRC-valid survivor, or None."""
    if spec.k_crc == 0:
        return 0
    s = result_u[:, list(spec.info_set)]
    H = syndrome_matrix(spec.k, spec.crc_poly)
    synd = s.astype(np.int64) @ H.astype(np.int64)
    ok = ~np.any(synd & 1, axis=1)
    hits = np.flatnonzero(ok)
    return int(hits[0]) if hits.size else None


def scl_decode(alpha_channel: np.ndarray, spec: CodeSpec, list_size: int) -> ListResult:
    """SCL sweep with up to `list_size` survivors; no CRC involvement."""
    if list_size < 1:
        raise ValueError("list size must be >= 1")
    alpha = np.asarray(alpha_channel, dtype=np.float64)
    if alpha.shape != (spec.N,):
        raise ValueError(f"alpha has shape {alpha.shape}, expected ({spec.N},)")
    alpha_perm = np.ascontiguousarray(alpha[bit_reversal(spec.n)])
    frozen = spec.frozen_mask.astype(np.uint8)
    uhat, pm, count = _scl_kernel(alpha_perm, frozen, list_size)
    return ListResult(survivors_u=uhat[:count], pms=pm[:count])


def sc_decode(alpha_channel: np.ndarray, spec: CodeSpec) -> np.ndarray:
    """Plain successive cancellation: the single surviving path of L=1."""
    return scl_decode(alpha_channel, spec, 1).survivors_u[0]


@dataclass(frozen=True)
class CaSclResult:
    decoded_u: Optional[np.ndarray]
    survivors: ListResult


def ca_scl_decode(alpha_channel: np.ndarray, spec: CodeSpec, list_size: int) -> CaSclResult:
    """CRC-aided SCL: the lowest-pm CRC-valid survivor, if any.

    The CRC layer only selects; survivor set and metrics are exactly
    those of scl_decode.
    """
    res = scl_decode(alpha_channel, spec, list_size)
    passed = _check_survivors(res.survivors_u, spec)
    res = ListResult(survivors_u=res.survivors_u, pms=res.pms, passed=passed)
    decoded = res.survivors_u[passed] if passed is not None else None
    return CaSclResult(decoded_u=decoded, survivors=res)


def adscl_decode(alpha_channel: np.ndarray, spec: CodeSpec, l_max: int) -> AdaptiveResult:
    """Adaptive SCL: run CA-SCL at L = 1, 2, 4, ..., l_max, stopping at the
    first CRC pass.  node_count accumulates L * N * log2(N) per attempted
    round."""
    if l_max < 1 or (l_max & (l_max - 1)):
        raise ValueError("l_max must be a power of two >= 1")
    rounds = []
    node_count = 0.0
    unit = spec.N * spec.n
    ell = 1
    while ell <= l_max:
        rounds.append(ell)
        node_count += ell * unit
        out = ca_scl_decode(alpha_channel, spec, ell)
        if out.decoded_u is not None:
            return AdaptiveResult(
                decoded_u=out.decoded_u,
                survivors=None,
                rounds=tuple(rounds),
                node_count=node_count,
            )
        if ell == l_max:
            return AdaptiveResult(
                decoded_u=None,
                survivors=out.survivors,
                rounds=tuple(rounds),
                node_count=node_count,
            )
        ell *= 2
    raise AssertionError("unreachable")
