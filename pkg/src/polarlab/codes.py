"""GF(2) structural machinery of CRC-polar concatenated codes.

Code description, generator matrix G = G2^(kron n), bit-reversal
permutation, O(N log N) encoding, and brute-force distance spectrum.

Indexing convention: the literature numbers bit positions 1..N; everything
in this package is 0-based (position i here is position i+1 in standard
notation).  This is the only place the mapping is stated.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

G2 = np.array([[1, 0], [1, 1]], dtype=np.uint8)

# G for n > _MAX_MATERIALIZED_N is never built explicitly; encoding always
# goes through the butterfly recursion.
_MAX_MATERIALIZED_N = 14


class CapacityExceededError(Exception):
    """Raised when an exhaustive enumeration would be infeasible."""


@dataclass(frozen=True)
class SpectrumResult:
    """Minimum Hamming weight and its multiplicity."""

    d_min: int
    a_dmin: int


@dataclass(frozen=True)
class CodeSpec:
    """Complete description of one CRC-polar concatenated code.

    Attributes:
        n: log2 of the code length, N = 2**n.
        k_info: number of message bits.
        k_crc: number of CRC parity bits.
        info_set: sorted tuple of the K = k_info + k_crc information
            positions of u (0-based).
        crc_poly: CRC generator polynomial as a bit tuple, highest degree
            first (length k_crc + 1); empty-CRC codes use (1,).
    """

    n: int
    k_info: int
    k_crc: int
    info_set: tuple[int, ...]
    crc_poly: tuple[int, ...] = (1,)

    def __post_init__(self):
        N = 1 << self.n
        object.__setattr__(self, "info_set", tuple(sorted(self.info_set)))
        if self.k_info < 1:
            raise ValueError("k_info must be >= 1")
        if self.k_info >= N:
            raise ValueError(f"rate k_info/N must be < 1, got {self.k_info}/{N}")
        if len(self.info_set) != self.k:
            raise ValueError(
                f"info_set has {len(self.info_set)} indices, expected K={self.k}"
            )
        if len(set(self.info_set)) != self.k:
            raise ValueError("info_set contains duplicates")
        if self.info_set and (self.info_set[0] < 0 or self.info_set[-1] >= N):
            raise ValueError(f"info_set indices must lie in [0, {N})")
        if len(self.crc_poly) != self.k_crc + 1:
            raise ValueError(
                f"crc_poly has degree {len(self.crc_poly) - 1}, expected {self.k_crc}"
            )
        if self.crc_poly[0] != 1 or self.crc_poly[-1] != 1:
            raise ValueError("CRC polynomial needs leading and trailing coefficient 1")

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def k(self) -> int:
        return self.k_info + self.k_crc

    @property
    def rate(self) -> float:
        return self.k_info / self.N

    @property
    def frozen_mask(self) -> np.ndarray:
        """Boolean mask over u positions, True where frozen."""
        mask = np.ones(self.N, dtype=bool)
        mask[list(self.info_set)] = False
        return mask


def build_generator(n: int) -> np.ndarray:
    """N x N generator matrix G2^(kron n) as a uint8 array.

    Lower triangular with unit diagonal; G @ G = I over GF(2).
    """
    if not 0 <= n <= _MAX_MATERIALIZED_N:
        raise ValueError(f"n must be in [0, {_MAX_MATERIALIZED_N}], got {n}")
    G = np.array([[1]], dtype=np.uint8)
    for _ in range(n):
        G = np.kron(G2, G)
    return G


@lru_cache(maxsize=None)
def bit_reversal(n: int) -> np.ndarray:
    """Permutation pi with pi[i] = n-bit reversal of i; an involution."""
    if not 0 <= n <= _MAX_MATERIALIZED_N:
        raise ValueError(f"n must be in [0, {_MAX_MATERIALIZED_N}], got {n}")
    N = 1 << n
    pi = np.zeros(N, dtype=np.int64)
    for i in range(N):
        r = 0
        for b in range(n):
            r = (r << 1) | ((i >> b) & 1)
        pi[i] = r
    pi.setflags(write=False)
    return pi


def polar_transform(v: np.ndarray) -> np.ndarray:
    """v @ G2^(kron n) over GF(2) via the butterfly; works on 1-D or
    row-batched 2-D inputs."""
    x = np.array(v, dtype=np.uint8, copy=True)
    N = x.shape[-1]
    if N & (N - 1):
        raise ValueError(f"length {N} is not a power of two")
    h = 1
    while h < N:
        for i in range(0, N, 2 * h):
            x[..., i : i + h] ^= x[..., i + h : i + 2 * h]
        h *= 2
    return x


def encode(u: np.ndarray, spec: CodeSpec) -> np.ndarray:
    """Codeword c = (u B) G over GF(2); u must be zero on frozen positions."""
    u = np.asarray(u, dtype=np.uint8)
    if u.shape[-1] != spec.N:
        raise ValueError(f"u has length {u.shape[-1]}, expected N={spec.N}")
    if np.any(u[..., spec.frozen_mask]):
        raise ValueError("nonzero bit on a frozen position")
    v = u[..., bit_reversal(spec.n)]
    return polar_transform(v)


def encode_message(s: np.ndarray, spec: CodeSpec) -> np.ndarray:
    """Place the K information bits s into u per the info set and encode."""
    s = np.asarray(s, dtype=np.uint8)
    if s.shape[-1] != spec.k:
        raise ValueError(f"s has length {s.shape[-1]}, expected K={spec.k}")
    u = np.zeros(s.shape[:-1] + (spec.N,), dtype=np.uint8)
    u[..., list(spec.info_set)] = s
    return polar_transform(u[..., bit_reversal(spec.n)])


def distance_spectrum(spec: CodeSpec) -> SpectrumResult:
    """d_min and its multiplicity by exhausting all 2**k_info nonzero
    CRC-valid messages of the concatenated code.

    Capped at K <= 28; larger codes raise CapacityExceededError rather
    than silently truncating.
    """
    from .crc import parity_matrix  # deferred: crc imports CodeSpec

    if spec.k > 28:
        raise CapacityExceededError(
            f"distance spectrum enumeration is capped at K <= 28, got K={spec.k}"
        )
    # CRC encoding is linear, so batches of messages get their parity bits
    # from one matrix product instead of per-message long division.
    P = parity_matrix(spec.k_info, spec.crc_poly)
    d_min = spec.N + 1
    a_dmin = 0
    batch = 8192
    n_msgs = 1 << spec.k_info
    for start in range(1, n_msgs, batch):  # message 0 gives the zero codeword
        idx = np.arange(start, min(start + batch, n_msgs), dtype=np.uint32)
        msgs = (
            (idx[:, None] >> np.arange(spec.k_info - 1, -1, -1)[None, :]) & 1
        ).astype(np.uint8)
        s = np.concatenate([msgs, (msgs.astype(np.uint32) @ P) % 2], axis=1)
        c = encode_message(s.astype(np.uint8), spec)
        w = c.sum(axis=1)
        lo = int(w.min())
        if lo < d_min:
            d_min = lo
            a_dmin = int(np.count_nonzero(w == lo))
        elif lo == d_min:
            a_dmin += int(np.count_nonzero(w == d_min))
    return SpectrumResult(d_min=d_min, a_dmin=a_dmin)
