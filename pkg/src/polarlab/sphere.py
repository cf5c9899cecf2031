"""CRC-aided sphere decoding and the hybrid ADSCL + sphere decoder.

The sphere search enumerates v = uB from v_{N-1} down to v_0 (G is lower
triangular, so the partial squared distance over assigned suffixes grows
monotonically), forcing every bit pinned by a frozen or CRC parity
constraint and exploring free bits nearer-symbol-first.  Subtrees whose
partial distance reaches the current squared radius are pruned (strict
inequality); a CRC-revalidated survivor is installed as the incumbent up
front, so the search always returns a valid sequence and every radius
update strictly shrinks it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from numba import njit

from .channel import ReceivedVector, channel_llr
from .codes import CodeSpec, bit_reversal, build_generator, polar_transform
from .crc import recalc_crc, syndrome_matrix
from .scl import AdaptiveResult, adscl_decode


@dataclass(frozen=True)
class ConstraintSystem:
    """Row-reduced GF(2) constraints over v_0..v_{N-1}.

    Every row's minimal support index is unique (`pivot_of_index` maps it
    back to the row); during the v_{N-1}->v_0 search the pivot bit of a
    row is forced by the already-assigned higher indices.
    """

    rows: np.ndarray  # (R, N) uint8, reduced row echelon form
    pivot_of_index: np.ndarray  # (N,) int64, row index or -1

    @property
    def num_rows(self) -> int:
        return self.rows.shape[0]


class ConstraintError(Exception):
    """Constraint assembly found dependent (duplicate) rows."""


def build_constraints(spec: CodeSpec) -> ConstraintSystem:
    """Frozen rows v_pi(i) = 0 plus CRC parity rows mapped through u = vB,
    Gaussian-eliminated so each row has a distinct minimal support index."""
    N = spec.N
    pi = bit_reversal(spec.n)
    n_frozen = N - spec.k
    rows = np.zeros((n_frozen + spec.k_crc, N), dtype=np.uint8)
    r = 0
    for i in range(N):
        if spec.frozen_mask[i]:
            rows[r, pi[i]] = 1
            r += 1
    H = syndrome_matrix(spec.k, spec.crc_poly)  # (K, k_crc)
    for t in range(spec.k_crc):
        for j, u_idx in enumerate(spec.info_set):
            rows[r, pi[u_idx]] = H[j, t]
        r += 1

    # GF(2) reduced row echelon form, pivoting on ascending column index
    rows = rows.copy()
    n_rows = rows.shape[0]
    pivot_of_index = np.full(N, -1, dtype=np.int64)
    rank = 0
    for col in range(N):
        sel = -1
        for rr in range(rank, n_rows):
            if rows[rr, col]:
                sel = rr
                break
        if sel < 0:
            continue
        if sel != rank:
            rows[[rank, sel]] = rows[[sel, rank]]
        for rr in range(n_rows):
            if rr != rank and rows[rr, col]:
                rows[rr] ^= rows[rank]
        pivot_of_index[col] = rank
        rank += 1
    if rank < n_rows:
        raise ConstraintError(
            f"constraint system is rank deficient: row {rank} of {n_rows} "
            "reduced to zero (duplicate frozen/CRC constraint)"
        )
    rows.setflags(write=False)
    pivot_of_index.setflags(write=False)
    return ConstraintSystem(rows=rows, pivot_of_index=pivot_of_index)


@lru_cache(maxsize=8)
def _generator_packed(n: int) -> np.ndarray:
    """Rows of G packed into uint64 words, little-endian bit order."""
    G = build_generator(n)
    N = G.shape[0]
    n_words = (N + 63) // 64
    packed = np.zeros((N, n_words), dtype=np.uint64)
    for i in range(N):
        for j in range(N):
            if G[i, j]:
                packed[i, j >> 6] |= np.uint64(1) << np.uint64(j & 63)
    packed.setflags(write=False)
    return packed


def _var_rows_csr(cons: ConstraintSystem) -> tuple[np.ndarray, np.ndarray]:
    """For each variable, the rows containing it beyond their pivot."""
    N = cons.rows.shape[1]
    lists: list[list[int]] = [[] for _ in range(N)]
    for r in range(cons.num_rows):
        support = np.flatnonzero(cons.rows[r])
        for j in support[1:]:  # support[0] is the pivot
            lists[j].append(r)
    ptr = np.zeros(N + 1, dtype=np.int64)
    for j in range(N):
        ptr[j + 1] = ptr[j] + len(lists[j])
    idx = np.zeros(ptr[-1], dtype=np.int64)
    for j in range(N):
        idx[ptr[j] : ptr[j + 1]] = lists[j]
    return ptr, idx


@njit(cache=True)
def _sd_kernel(y, g_pack, pivot_of_index, var_ptr, var_idx, r0_sq, incumbent_v, prune):
    """Depth-first branch-and-bound from v_{N-1} to v_0.

    Returns (best_v, best_sq, visited); visited counts every partial
    distance evaluation, constraint-forced assignments included.  The
    running column parities of the assigned suffix live in a packed
    bitset so an assignment costs O(N/64) words.
    """
    N = y.shape[0]
    n_words = g_pack.shape[1]
    n_rows = 0
    for i in range(N):
        if pivot_of_index[i] >= 0 and pivot_of_index[i] + 1 > n_rows:
            n_rows = pivot_of_index[i] + 1

    acc = np.zeros(n_words, dtype=np.uint64)
    word = np.zeros(N, dtype=np.int64)
    mask = np.zeros(N, dtype=np.uint64)
    for i in range(N):
        word[i] = i >> 6
        mask[i] = np.uint64(1) << np.uint64(i & 63)
    rowpar = np.zeros(n_rows + 1, dtype=np.uint8)
    v = np.zeros(N, dtype=np.uint8)
    stage = np.zeros(N, dtype=np.uint8)
    dstack = np.zeros(N + 1, dtype=np.float64)
    hard = np.zeros(N, dtype=np.int64)  # nearer BPSK symbol per position
    for i in range(N):
        if y[i] < 0.0:
            hard[i] = 1

    best_v = incumbent_v.copy()
    best_sq = r0_sq
    visited = 0

    i = N - 1
    stage[i] = 0
    while True:
        forced = pivot_of_index[i] >= 0
        n_cand = 1 if forced else 2
        if stage[i] < n_cand:
            a = np.int64(1) if acc[word[i]] & mask[i] else np.int64(0)
            if forced:
                vb = np.int64(rowpar[pivot_of_index[i]])
            elif stage[i] == 0:
                vb = hard[i] ^ a
            else:
                vb = np.int64(1) - (hard[i] ^ a)
            stage[i] += 1
            b = a ^ vb
            x = 1.0 - 2.0 * np.float64(b)
            diff = y[i] - x
            nd = dstack[i + 1] + diff * diff
            visited += 1
            if (not prune) or nd < best_sq:
                if i == 0:
                    if nd < best_sq:
                        best_sq = nd
                        for t in range(1, N):
                            best_v[t] = v[t]
                        best_v[0] = vb
                else:
                    v[i] = vb
                    if vb:
                        for w in range(n_words):
                            acc[w] ^= g_pack[i, w]
                        for q in range(var_ptr[i], var_ptr[i + 1]):
                            rowpar[var_idx[q]] ^= 1
                    dstack[i] = nd
                    i -= 1
                    stage[i] = 0
        else:
            if i == N - 1:
                break
            i += 1
            if v[i]:
                for w in range(n_words):
                    acc[w] ^= g_pack[i, w]
                for q in range(var_ptr[i], var_ptr[i + 1]):
                    rowpar[var_idx[q]] ^= 1
    return best_v, best_sq, visited


@dataclass(frozen=True)
class SphereResult:
    u_hat: np.ndarray
    sq_distance: float
    visited_nodes: int


def initial_radius(
    survivors_u: np.ndarray, received: ReceivedVector, spec: CodeSpec
) -> tuple[float, np.ndarray]:
    """Recalculate the CRC bits of each survivor, re-encode, and take the
    minimum Euclidean distance to y as the initial radius.

    Returns (r0, incumbent u); ties go to the lowest survivor index.  The
    incumbent is CRC-valid by construction, so r0 always admits at least
    one valid sequence.
    """
    survivors_u = np.atleast_2d(np.asarray(survivors_u, dtype=np.uint8))
    if survivors_u.shape[0] < 1:
        raise ValueError("need at least one survivor")
    fixed = np.array([recalc_crc(u, spec) for u in survivors_u], dtype=np.uint8)
    c = polar_transform(fixed[:, bit_reversal(spec.n)])
    x = 1.0 - 2.0 * c.astype(np.float64)
    dists = np.sum((received.y[None, :] - x) ** 2, axis=1)
    best = int(np.argmin(dists))  # argmin takes the first minimum
    return float(np.sqrt(dists[best])), fixed[best]


def ca_sd(
    received: ReceivedVector,
    spec: CodeSpec,
    constraints: ConstraintSystem,
    r0: float,
    incumbent_u: np.ndarray,
    prune: bool = True,
) -> SphereResult:
    """Exact ML decoding over the CRC-valid set by sphere search.

    The incumbent (CRC-valid, distance <= r0) guarantees a return value;
    `prune=False` degrades to full constrained enumeration and exists for
    cross-checking the pruning logic.
    """
    y = np.asarray(received.y, dtype=np.float64)
    if y.shape != (spec.N,):
        raise ValueError(f"y has shape {y.shape}, expected ({spec.N},)")
    incumbent_u = np.asarray(incumbent_u, dtype=np.uint8)
    incumbent_v = incumbent_u[bit_reversal(spec.n)]
    inc_dist = float(np.sum((y - (1.0 - 2.0 * polar_transform(incumbent_v))) ** 2))
    if inc_dist > r0 * r0 + 1e-9:
        raise ValueError(
            f"incumbent distance {np.sqrt(inc_dist):.6f} exceeds initial radius {r0:.6f}"
        )
    g_pack = _generator_packed(spec.n)
    var_ptr, var_idx = _var_rows_csr(constraints)
    best_v, best_sq, visited = _sd_kernel(
        y, g_pack, constraints.pivot_of_index, var_ptr, var_idx, r0 * r0, incumbent_v, prune
    )
    u_hat = best_v[bit_reversal(spec.n)]
    return SphereResult(u_hat=u_hat, sq_distance=float(best_sq), visited_nodes=int(visited))


ADSCL_ONLY = "adscl-only"
SD_INVOKED = "sd-invoked"


@dataclass(frozen=True)
class CaHdResult:
    u_hat: np.ndarray
    node_count: float
    stage: str  # ADSCL_ONLY or SD_INVOKED
    adscl: AdaptiveResult
    sd: Optional[SphereResult] = None


def ca_hd(
    received: ReceivedVector,
    spec: CodeSpec,
    l_max: int,
    constraints: Optional[ConstraintSystem] = None,
) -> CaHdResult:
    """Hybrid decoding: ADSCL first; on exhaustion, CRC-aided sphere
    decoding seeded with the recalculated-survivor radius."""
    alpha = channel_llr(received)
    ad = adscl_decode(alpha, spec, l_max)
    if ad.decoded_u is not None:
        return CaHdResult(
            u_hat=ad.decoded_u, node_count=ad.node_count, stage=ADSCL_ONLY, adscl=ad
        )
    if constraints is None:
        constraints = build_constraints(spec)
    r0, incumbent = initial_radius(ad.survivors.survivors_u, received, spec)
    sd = ca_sd(received, spec, constraints, r0, incumbent)
    return CaHdResult(
        u_hat=sd.u_hat,
        node_count=ad.node_count + sd.visited_nodes,
        stage=SD_INVOKED,
        adscl=ad,
        sd=sd,
    )
