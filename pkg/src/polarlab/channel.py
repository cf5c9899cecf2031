"""BPSK over the binary-input AWGN channel: modulation, SNR conversions,
noise generation, and channel LLRs.

SNR is Es/N0 = 1/(2 sigma^2) throughout.  Noise uses numpy's PCG64
generator (ziggurat normal sampling); per-trial streams are derived with
SeedSequence so that serial and parallel sweeps see identical noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NoiseModel:
    """Per-dimension noise std dev and the matching Es/N0 in dB."""

    sigma: float
    es_n0_db: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if abs(self.sigma - snr_db_to_sigma(self.es_n0_db)) > 1e-12 * self.sigma:
            raise ValueError(
                f"sigma={self.sigma} inconsistent with Es/N0={self.es_n0_db} dB"
            )

    @classmethod
    def from_snr_db(cls, es_n0_db: float) -> "NoiseModel":
        return cls(sigma=snr_db_to_sigma(es_n0_db), es_n0_db=es_n0_db)


def snr_db_to_sigma(es_n0_db: float) -> float:
    """sigma = 1 / sqrt(2 * 10^(EsN0_dB/10))."""
    return 1.0 / math.sqrt(2.0 * 10.0 ** (es_n0_db / 10.0))


def sigma_to_snr_db(sigma: float) -> float:
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return 10.0 * math.log10(1.0 / (2.0 * sigma * sigma))


def modulate(c: np.ndarray) -> np.ndarray:
    """BPSK mapping x_i = 1 - 2 c_i (bit 0 -> +1)."""
    return 1.0 - 2.0 * np.asarray(c, dtype=np.float64)


@dataclass(frozen=True)
class ReceivedVector:
    """Channel output y together with the noise model that produced it."""

    y: np.ndarray
    noise: NoiseModel

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.float64)
        if not np.all(np.isfinite(y)):
            raise ValueError("received samples must be finite")
        object.__setattr__(self, "y", y)


def trial_rng(master_seed: int, point_index: int, trial_index: int) -> np.random.Generator:
    """Generator for one (SNR point, trial) pair, independent of how trials
    are scheduled across workers."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((master_seed, point_index, trial_index)))
    )


def transmit(x: np.ndarray, noise: NoiseModel, rng: np.random.Generator) -> ReceivedVector:
    """y = x + n with n ~ Normal(0, sigma^2) i.i.d."""
    x = np.asarray(x, dtype=np.float64)
    return ReceivedVector(y=x + rng.normal(0.0, noise.sigma, size=x.shape), noise=noise)


def channel_llr(received: ReceivedVector) -> np.ndarray:
    """Channel LLRs alpha_i = 2 y_i / sigma^2; positive favors bit 0."""
    sigma = received.noise.sigma
    if sigma <= 0:
        raise ValueError("degenerate channel: sigma must be positive")
    return 2.0 * received.y / (sigma * sigma)
