"""CRC encoding, detection, parity recalculation, and the registry of
optimized polynomials for short CRC-polar codes.

Bit-order convention (fixed once, covered by golden-vector tests): the
first message bit is the highest-degree coefficient of b(x), and the
parity bits r(x) = x^k_crc * b(x) mod g(x) are appended most-significant
first.  Inside u, the k_crc parity bits occupy the last k_crc information
positions in natural index order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .codes import CodeSpec


def parse_poly(text: str) -> tuple[int, ...]:
    """Parse a CRC polynomial given as a binary string (g_kc..g_0) or as
    0x-prefixed hex with an explicit degree suffix, e.g. '0x1e7c5:16'."""
    text = text.strip()
    if text.lower().startswith("0x"):
        body, sep, deg = text.partition(":")
        if not sep:
            raise ValueError("hex CRC polynomial needs an explicit ':degree' suffix")
        degree = int(deg)
        value = int(body, 16)
        bits = tuple((value >> i) & 1 for i in range(degree, -1, -1))
    else:
        if set(text) - {"0", "1"}:
            raise ValueError(f"not a binary polynomial string: {text!r}")
        bits = tuple(int(ch) for ch in text)
    if len(bits) < 1 or bits[0] != 1 or bits[-1] != 1:
        raise ValueError(
            "CRC polynomial must have leading and trailing coefficient 1"
        )
    return bits


def crc_encode(b: np.ndarray, poly: tuple[int, ...]) -> np.ndarray:
    """Systematic CRC codeword s = (b, parity) of length K = k_info + k_crc.

    s(x) = x^k_crc * b(x) + (x^k_crc * b(x) mod g(x)), which g(x) divides.
    """
    b = np.asarray(b, dtype=np.uint8)
    k_crc = len(poly) - 1
    if k_crc == 0:
        return b.copy()
    g = np.asarray(poly, dtype=np.uint8)
    work = np.concatenate([b, np.zeros(k_crc, dtype=np.uint8)])
    for i in range(len(b)):
        if work[i]:
            work[i : i + k_crc + 1] ^= g
    return np.concatenate([b, work[len(b) :]])


def crc_check(s: np.ndarray, poly: tuple[int, ...]) -> bool:
    """True iff s(x) mod g(x) = 0."""
    s = np.asarray(s, dtype=np.uint8)
    k_crc = len(poly) - 1
    if k_crc == 0:
        return True
    g = np.asarray(poly, dtype=np.uint8)
    work = s.copy()
    for i in range(len(s) - k_crc):
        if work[i]:
            work[i : i + k_crc + 1] ^= g
    return not work[-k_crc:].any()


@lru_cache(maxsize=None)
def _parity_matrix_cached(k_info: int, poly: tuple[int, ...]) -> np.ndarray:
    k_crc = len(poly) - 1
    P = np.zeros((k_info, k_crc), dtype=np.uint8)
    for i in range(k_info):
        e = np.zeros(k_info, dtype=np.uint8)
        e[i] = 1
        P[i] = crc_encode(e, poly)[k_info:]
    P.setflags(write=False)
    return P


def parity_matrix(k_info: int, poly: tuple[int, ...]) -> np.ndarray:
    """Matrix P with parity(b) = b @ P mod 2 (CRC encoding is linear)."""
    return _parity_matrix_cached(k_info, tuple(poly))


@lru_cache(maxsize=None)
def syndrome_matrix(k: int, poly: tuple[int, ...]) -> np.ndarray:
    """Matrix H (K x k_crc) with s valid iff s @ H mod 2 = 0."""
    k_crc = len(poly) - 1
    H = np.zeros((k, k_crc), dtype=np.uint8)
    if k_crc == 0:
        H.setflags(write=False)
        return H
    g = np.asarray(poly, dtype=np.uint8)
    for i in range(k):
        # remainder of x^(K-1-i) mod g(x)
        work = np.zeros(k, dtype=np.uint8)
        work[i] = 1
        for j in range(k - k_crc):
            if work[j]:
                work[j : j + k_crc + 1] ^= g
        H[i] = work[-k_crc:]
    H.setflags(write=False)
    return H


def recalc_crc(u_hat: np.ndarray, spec: CodeSpec) -> np.ndarray:
    """Replace the CRC bits of u_hat with parity freshly computed from its
    message bits; the result always passes crc_check.  Idempotent, and a
    fixed point on already-valid inputs."""
    u_hat = np.asarray(u_hat, dtype=np.uint8)
    info = list(spec.info_set)
    b = u_hat[info[: spec.k_info]]
    s = crc_encode(b, spec.crc_poly)
    u = u_hat.copy()
    u[info] = s
    return u


@dataclass(frozen=True)
class RegistryEntry:
    n_code: int
    rate: Fraction
    k_crc: int
    poly: tuple[int, ...]
    d_min: int
    a_dmin: int


# Optimized CRC polynomials for short polar codes, stored bit-exactly as
# (g_kc..g_0) strings.  d_min / a_dmin are the recorded values for the
# concatenated codes; re-deriving them is infeasible at these sizes.
_REGISTRY_ROWS = [
    (64, Fraction(1, 3), 12, "1100110100101", 16, 168),
    (64, Fraction(1, 2), 13, "11110101010101", 10, 34),
    (64, Fraction(2, 3), 18, "1010110011010001001", 8, 4238),
    (128, Fraction(1, 3), 20, "100000000010111010001", 24, 171),
    (128, Fraction(1, 2), 24, "1000000000000000111100101", 16, 66),
    (128, Fraction(2, 3), 16, "10001011110110111", 10, 167),
]

CRC_REGISTRY: dict[tuple[int, Fraction], RegistryEntry] = {
    (N, R): RegistryEntry(N, R, k_crc, parse_poly(bits), d_min, a_dmin)
    for N, R, k_crc, bits, d_min, a_dmin in _REGISTRY_ROWS
}


def registry_lookup(n_code: int, rate: Fraction | float | str) -> RegistryEntry:
    """Fetch the registry entry for (N, R); R accepts '1/2' style strings."""
    if isinstance(rate, str):
        rate = Fraction(rate)
    rate = Fraction(rate).limit_denominator(64)
    try:
        return CRC_REGISTRY[(n_code, rate)]
    except KeyError:
        raise KeyError(
            f"no registry polynomial for N={n_code}, R={rate}; "
            f"known: {sorted(CRC_REGISTRY)}"
        ) from None
