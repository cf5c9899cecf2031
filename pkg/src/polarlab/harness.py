"""Monte-Carlo BLER and complexity sweeps over the decoder family, with
deterministic replay, visited-node accounting, and CSV persistence.

Determinism contract: a record is a pure function of (config, seed).  Each
trial draws its message and noise from a stream keyed by (seed, SNR point
index, trial index), trials are aggregated in index order, and the
stopping rule scans cumulative errors in trial order — so 1 worker and 8
workers produce identical records (wall_time_s, being a measurement, is
the one field exempt).
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .channel import NoiseModel, ReceivedVector, channel_llr, snr_db_to_sigma, trial_rng
from .codes import CodeSpec, encode_message
from .construction import ga_construct
from .crc import parity_matrix
from .scl import adscl_decode, ca_scl_decode, scl_decode
from .sphere import (
    SD_INVOKED,
    build_constraints,
    ca_hd,
    ca_sd,
    initial_radius,
)

DECODERS = ("sc", "scl", "ca-scl", "adscl", "ca-sd", "ca-hd")

CSV_HEADER = (
    "decoder,n,k_info,k_crc,crc_poly,snr_db,trials,block_errors,bler,"
    "avn,avg_list_sum,avg_list_final,sd_rate,seed,wall_time_s"
)

_CHUNK = 256  # trials per scheduling unit; fixed so worker count is invisible


@dataclass(frozen=True)
class SweepConfig:
    """Everything one sweep needs; see the CLI for the matching flags."""

    n: int
    k_info: int
    k_crc: int
    crc_poly: tuple[int, ...]
    decoder: str
    snr_db: tuple[float, ...]
    list_size: int = 8  # scl / ca-scl
    max_list: int = 1024  # adscl / ca-hd
    initial_radius: Optional[float] = None  # ca-sd; None = auto (Eq.-style seed)
    design_snr_db: Optional[float] = None  # None = construct at each sweep point
    min_errors: int = 100
    max_trials: int = 10_000_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder {self.decoder!r}; pick from {DECODERS}")
        if self.min_errors < 1:
            raise ValueError("min_errors must be >= 1")
        if self.max_trials < self.min_errors:
            raise ValueError("max_trials must be >= min_errors")
        if not self.snr_db:
            raise ValueError("SNR list must be nonempty")
        if self.decoder in ("adscl", "ca-hd") and (
            self.max_list < 1 or self.max_list & (self.max_list - 1)
        ):
            raise ValueError("max_list must be a power of two")
        if self.decoder in ("scl", "ca-scl") and self.list_size < 1:
            raise ValueError("list_size must be >= 1")


@dataclass(frozen=True)
class SimRecord:
    """One (decoder, SNR) measurement; block_errors/trials is the exact
    rational behind the rounded bler field."""

    decoder: str
    n: int
    k_info: int
    k_crc: int
    crc_poly: str
    snr_db: float
    trials: int
    block_errors: int
    bler: float
    avn: float
    avg_list_sum: Optional[float]
    avg_list_final: Optional[float]
    sd_rate: Optional[float]
    seed: int
    wall_time_s: float

    def __post_init__(self):
        if not 0.0 <= self.bler <= 1.0 or math.isnan(self.bler):
            raise ValueError(f"bler out of range: {self.bler}")
        if self.avn < 0:
            raise ValueError("avn must be nonnegative")

    @property
    def bler_fraction(self) -> Fraction:
        return Fraction(self.block_errors, self.trials)


@dataclass(frozen=True)
class TrialTrace:
    """What one decode cost, for visited-node accounting."""

    decoder: str
    n_block: int
    list_size: int = 1
    rounds: tuple[int, ...] = ()
    sd_visited: int = 0
    sd_invoked: bool = False


def account_avn(trace: TrialTrace) -> float:
    """Visited-node contribution of one trial.

    List decoders pay L * N * log2(N) per sweep (summed over attempted
    rounds for the adaptive one); the sphere stage pays its actual node
    expansions.
    """
    unit = trace.n_block * math.log2(trace.n_block)
    if trace.decoder == "sc":
        return unit
    if trace.decoder in ("scl", "ca-scl"):
        return trace.list_size * unit
    if trace.decoder == "adscl":
        return sum(trace.rounds) * unit
    if trace.decoder == "ca-hd":
        return sum(trace.rounds) * unit + trace.sd_visited
    if trace.decoder == "ca-sd":
        return float(trace.sd_visited)
    raise ValueError(f"unknown decoder {trace.decoder!r}")


def _build_spec(config: SweepConfig, snr_db: float) -> CodeSpec:
    design = config.design_snr_db if config.design_snr_db is not None else snr_db
    info = ga_construct(config.n, config.k_info + config.k_crc, snr_db_to_sigma(design))
    return CodeSpec(
        n=config.n,
        k_info=config.k_info,
        k_crc=config.k_crc,
        info_set=info,
        crc_poly=config.crc_poly,
    )


def _run_trial(spec, config, noise, point_index, trial_index, constraints):
    """One end-to-end trial; returns (is_error, TrialTrace)."""
    rng = trial_rng(config.seed, point_index, trial_index)
    b = rng.integers(0, 2, spec.k_info, dtype=np.uint8).astype(np.uint8)
    P = parity_matrix(spec.k_info, spec.crc_poly)
    s = np.concatenate([b, (b.astype(np.int64) @ P) % 2]).astype(np.uint8)
    c = encode_message(s, spec)
    x = 1.0 - 2.0 * c.astype(np.float64)
    received = ReceivedVector(y=x + rng.normal(0.0, noise.sigma, spec.N), noise=noise)
    alpha = channel_llr(received)
    info = list(spec.info_set)

    dec = config.decoder
    if dec == "sc":
        u_hat = scl_decode(alpha, spec, 1).survivors_u[0]
        trace = TrialTrace(decoder=dec, n_block=spec.N)
    elif dec == "scl":
        u_hat = scl_decode(alpha, spec, config.list_size).survivors_u[0]
        trace = TrialTrace(decoder=dec, n_block=spec.N, list_size=config.list_size)
    elif dec == "ca-scl":
        out = ca_scl_decode(alpha, spec, config.list_size)
        # no CRC pass: fall back to the metric-best survivor
        u_hat = out.decoded_u if out.decoded_u is not None else out.survivors.survivors_u[0]
        trace = TrialTrace(decoder=dec, n_block=spec.N, list_size=config.list_size)
    elif dec == "adscl":
        ad = adscl_decode(alpha, spec, config.max_list)
        u_hat = ad.decoded_u if ad.decoded_u is not None else ad.survivors.survivors_u[0]
        trace = TrialTrace(decoder=dec, n_block=spec.N, rounds=ad.rounds)
    elif dec == "ca-sd":
        sc_path = scl_decode(alpha, spec, 1).survivors_u
        r0, incumbent = initial_radius(sc_path, received, spec)
        if config.initial_radius is not None:
            r0 = max(config.initial_radius, r0)
        res = ca_sd(received, spec, constraints, r0, incumbent)
        u_hat = res.u_hat
        trace = TrialTrace(
            decoder=dec, n_block=spec.N, sd_visited=res.visited_nodes, sd_invoked=True
        )
    elif dec == "ca-hd":
        hd = ca_hd(received, spec, config.max_list, constraints)
        u_hat = hd.u_hat
        trace = TrialTrace(
            decoder=dec,
            n_block=spec.N,
            rounds=hd.adscl.rounds,
            sd_visited=hd.sd.visited_nodes if hd.sd is not None else 0,
            sd_invoked=hd.stage == SD_INVOKED,
        )
    else:  # pragma: no cover - guarded by SweepConfig
        raise ValueError(dec)

    b_hat = u_hat[info][: spec.k_info]
    return bool(not np.array_equal(b_hat, b)), trace


def _run_chunk(args):
    spec, config, noise, point_index, start, stop = args
    constraints = (
        build_constraints(spec) if config.decoder in ("ca-sd", "ca-hd") else None
    )
    out = []
    for t in range(start, stop):
        err, trace = _run_trial(spec, config, noise, point_index, t, constraints)
        out.append((err, trace))
    return out


def _run_point(config: SweepConfig, point_index: int, pool) -> SimRecord:
    snr_db = config.snr_db[point_index]
    t0 = time.perf_counter()
    spec = _build_spec(config, snr_db)
    noise = NoiseModel.from_snr_db(snr_db)

    errors = 0
    trials = 0
    avn_sum = 0.0
    list_sum = 0.0
    list_final = 0.0
    sd_count = 0
    done = False
    next_start = 0
    while not done and next_start < config.max_trials:
        # a batch of chunks big enough to keep workers busy, fixed layout
        batch = []
        for _ in range(max(config.workers, 1)):
            if next_start >= config.max_trials:
                break
            stop = min(next_start + _CHUNK, config.max_trials)
            batch.append((spec, config, noise, point_index, next_start, stop))
            next_start = stop
        if pool is None:
            results = [_run_chunk(a) for a in batch]
        else:
            results = list(pool.map(_run_chunk, batch))
        for chunk in results:
            for err, trace in chunk:
                if done:
                    break
                trials += 1
                errors += err
                avn_sum += account_avn(trace)
                if trace.rounds:
                    list_sum += sum(trace.rounds)
                    list_final += trace.rounds[-1]
                sd_count += trace.sd_invoked
                if errors >= config.min_errors:
                    done = True
            if done:
                break

    adaptive = config.decoder in ("adscl", "ca-hd")
    return SimRecord(
        decoder=config.decoder,
        n=config.n,
        k_info=config.k_info,
        k_crc=config.k_crc,
        crc_poly="".join(str(bit) for bit in config.crc_poly),
        snr_db=snr_db,
        trials=trials,
        block_errors=errors,
        bler=errors / trials,
        avn=avn_sum / trials,
        avg_list_sum=list_sum / trials if adaptive else None,
        avg_list_final=list_final / trials if adaptive else None,
        sd_rate=sd_count / trials if config.decoder == "ca-hd" else None,
        seed=config.seed,
        wall_time_s=time.perf_counter() - t0,
    )


def run_sweep(config: SweepConfig) -> list[SimRecord]:
    """All SNR points of one sweep; stops each point at min_errors block
    errors or max_trials."""
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return [_run_point(config, i, pool) for i in range(len(config.snr_db))]
    return [_run_point(config, i, None) for i in range(len(config.snr_db))]


# ---------------------------------------------------------------------------
# CSV persistence


class RecordParseError(Exception):
    """Malformed record file; carries the 1-based line number."""


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def write_records(records: Sequence[SimRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for rec in records:
            row = [
                rec.decoder,
                str(rec.n),
                str(rec.k_info),
                str(rec.k_crc),
                rec.crc_poly,
                _fmt(rec.snr_db),
                str(rec.trials),
                str(rec.block_errors),
                _fmt(rec.bler),
                _fmt(rec.avn),
                _fmt(rec.avg_list_sum),
                _fmt(rec.avg_list_final),
                _fmt(rec.sd_rate),
                str(rec.seed),
                _fmt(rec.wall_time_s),
            ]
            fh.write(",".join(row) + "\n")


def read_records(path) -> list[SimRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RecordParseError(f"{path}: empty file, expected header") from None
        if header != CSV_HEADER.split(","):
            raise RecordParseError(f"{path}: line 1: unexpected header {header}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 15:
                raise RecordParseError(
                    f"{path}: line {lineno}: expected 15 fields, got {len(row)}"
                )
            try:
                rec = SimRecord(
                    decoder=row[0],
                    n=int(row[1]),
                    k_info=int(row[2]),
                    k_crc=int(row[3]),
                    crc_poly=row[4],
                    snr_db=float(row[5]),
                    trials=int(row[6]),
                    block_errors=int(row[7]),
                    bler=float(row[8]),
                    avn=float(row[9]),
                    avg_list_sum=float(row[10]) if row[10] else None,
                    avg_list_final=float(row[11]) if row[11] else None,
                    sd_rate=float(row[12]) if row[12] else None,
                    seed=int(row[13]),
                    wall_time_s=float(row[14]),
                )
            except ValueError as exc:
                raise RecordParseError(f"{path}: line {lineno}: {exc}") from None
            records.append(rec)
    return records
