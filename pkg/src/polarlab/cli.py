"""Command-line front end: simulate | capacity | spectrum | construct.

Every long flag can also live in a config file of `key = value` lines
(keys match the flag names, '#' starts a comment); explicit command-line
values win over the file.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .capacity import biawgn_c_v, na_required_snr
from .channel import snr_db_to_sigma
from .codes import CodeSpec, distance_spectrum
from .construction import ga_construct
from .crc import parse_poly, registry_lookup
from .harness import SweepConfig, run_sweep, write_records


def parse_snr_sweep(text: str) -> tuple[float, ...]:
    """`start:step:stop` (inclusive), a comma list, or a single value."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"sweep syntax is start:step:stop, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("sweep step must be positive")
        points = []
        value = start
        while value <= stop + 1e-9:
            points.append(round(value, 10))
            value += step
        return tuple(points)
    return tuple(float(p) for p in text.split(","))


def read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config_file(args: argparse.Namespace, parser: argparse.ArgumentParser):
    if not getattr(args, "config", None):
        return
    file_values = read_config_file(args.config)
    types = {
        a.dest: a.type for a in parser._actions if a.type is not None
    }
    for key, raw in file_values.items():
        if not hasattr(args, key):
            raise ValueError(f"unknown config key {key!r}")
        if getattr(args, key) is None:
            cast = types.get(key, str)
            setattr(args, key, cast(raw))


def _resolve_crc(args) -> tuple[int, tuple[int, ...]]:
    if args.crc:
        poly = parse_poly(args.crc)
        return len(poly) - 1, poly
    if args.rate:
        entry = registry_lookup(args.n, Fraction(args.rate))
        return entry.k_crc, entry.poly
    raise SystemExit("simulate needs --crc <bits> or --rate <R> (registry lookup)")


def cmd_simulate(args) -> int:
    if args.n < 2 or args.n & (args.n - 1):
        raise SystemExit(f"--n must be a power of two >= 2, got {args.n}")
    k_crc, poly = _resolve_crc(args)
    config = SweepConfig(
        n=args.n.bit_length() - 1,
        k_info=args.k_info,
        k_crc=k_crc,
        crc_poly=poly,
        decoder=args.decoder,
        snr_db=parse_snr_sweep(args.snr),
        list_size=args.list_size if args.list_size is not None else 8,
        max_list=args.max_list if args.max_list is not None else 1024,
        initial_radius=None if args.initial_radius in (None, "auto") else float(args.initial_radius),
        design_snr_db=args.design_snr,
        min_errors=args.min_errors if args.min_errors is not None else 100,
        max_trials=args.max_trials if args.max_trials is not None else 10_000_000,
        seed=args.seed if args.seed is not None else 0,
        workers=args.workers if args.workers is not None else 1,
    )
    records = run_sweep(config)
    for rec in records:
        print(
            f"{rec.decoder} N={1 << rec.n} Es/N0={rec.snr_db:g} dB: "
            f"bler={rec.bler:.4e} ({rec.block_errors}/{rec.trials}) avn={rec.avn:.4e}"
        )
    if args.out:
        write_records(records, args.out)
        print(f"wrote {len(records)} records to {args.out}")
    return 0


def cmd_capacity(args) -> int:
    pe = args.pe if args.pe is not None else 1e-3
    rate = float(Fraction(args.rate)) if args.rate else 0.5
    snr = na_required_snr(args.n, rate, pe)
    c, v = biawgn_c_v(snr_db_to_sigma(snr))
    print("n,rate,pe,required_es_n0_db,capacity,dispersion")
    print(f"{args.n},{rate!r},{pe!r},{snr!r},{c!r},{v!r}")
    return 0


def cmd_spectrum(args) -> int:
    k_crc, poly = _resolve_crc(args)
    design = args.design_snr if args.design_snr is not None else 2.0
    n = args.n.bit_length() - 1
    info = ga_construct(n, args.k_info + k_crc, snr_db_to_sigma(design))
    spec = CodeSpec(n=n, k_info=args.k_info, k_crc=k_crc, info_set=info, crc_poly=poly)
    result = distance_spectrum(spec)
    print("n,k_info,k_crc,design_snr_db,d_min,a_dmin")
    print(f"{args.n},{args.k_info},{k_crc},{design!r},{result.d_min},{result.a_dmin}")
    return 0


def cmd_construct(args) -> int:
    design = args.design_snr if args.design_snr is not None else 2.0
    n = args.n.bit_length() - 1
    info = ga_construct(n, args.k, snr_db_to_sigma(design))
    print(" ".join(str(i) for i in info))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarlab",
        description="CRC-polar concatenated codes: simulation and analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte-Carlo BLER/complexity sweep")
    sim.add_argument("--config", help="key = value file; CLI flags override it")
    sim.add_argument("--n", type=int, required=True, help="code length N (power of two)")
    sim.add_argument("--k-info", type=int, required=True, help="message bits K_I")
    sim.add_argument("--crc", help="CRC polynomial bits g_kc..g_0 (or 0xHEX:degree)")
    sim.add_argument("--rate", help="registry lookup key, e.g. 1/2 (alternative to --crc)")
    sim.add_argument(
        "--decoder",
        required=True,
        choices=["sc", "scl", "ca-scl", "adscl", "ca-sd", "ca-hd"],
    )
    sim.add_argument("--snr", required=True, help="Es/N0 sweep, dB: start:step:stop")
    sim.add_argument("--list-size", type=int, help="L for scl/ca-scl (default 8)")
    sim.add_argument("--max-list", type=int, help="L_max for adscl/ca-hd (default 1024)")
    sim.add_argument(
        "--initial-radius", help="ca-sd radius: 'auto' (default) or a float"
    )
    sim.add_argument(
        "--design-snr", type=float, help="fixed construction SNR in dB (default: per point)"
    )
    sim.add_argument("--min-errors", type=int, help="stop after this many block errors (default 100)")
    sim.add_argument("--max-trials", type=int, help="trial cap per point (default 1e7)")
    sim.add_argument("--seed", type=int, help="master seed (default 0)")
    sim.add_argument("--workers", type=int, help="parallel workers (default 1)")
    sim.add_argument("--out", help="CSV output path")
    sim.set_defaults(func=cmd_simulate)

    cap = sub.add_parser("capacity", help="normal-approximation required SNR")
    cap.add_argument("--config", help="key = value file; CLI flags override it")
    cap.add_argument("--n", type=int, required=True, help="blocklength")
    cap.add_argument("--rate", help="target rate, e.g. 1/2 (default 1/2)")
    cap.add_argument("--pe", type=float, help="target block error probability (default 1e-3)")
    cap.set_defaults(func=cmd_capacity)

    spec_p = sub.add_parser("spectrum", help="brute-force d_min / A_dmin of a small code")
    spec_p.add_argument("--config", help="key = value file; CLI flags override it")
    spec_p.add_argument("--n", type=int, required=True, help="code length N")
    spec_p.add_argument("--k-info", type=int, required=True)
    spec_p.add_argument("--crc", help="CRC polynomial bits")
    spec_p.add_argument("--rate", help="registry lookup key (alternative to --crc)")
    spec_p.add_argument("--design-snr", type=float, help="construction SNR in dB (default 2.0)")
    spec_p.set_defaults(func=cmd_spectrum)

    con = sub.add_parser("construct", help="GA information set")
    con.add_argument("--config", help="key = value file; CLI flags override it")
    con.add_argument("--n", type=int, required=True, help="code length N")
    con.add_argument("--k", type=int, required=True, help="information positions K")
    con.add_argument("--design-snr", type=float, help="construction SNR in dB (default 2.0)")
    con.set_defaults(func=cmd_construct)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config_file(args, parser)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
