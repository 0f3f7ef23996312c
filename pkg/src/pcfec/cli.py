"""Command-line driver.

Subcommands: transition-table, de-run, de-threshold, export-lut,
design-quantizer, simulate.  Exit codes: 0 ok, 1 configuration error,
2 runtime error (argparse itself exits 2 on unknown commands/flags).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .bch import cached_code
from .channel import ChannelModel, ebn0_to_sigma, esn0_db_to_sigma, lloyd_max_design, mixture_model
from .de import TransitionTable, de_run, estimate_transition_table, export_lut, threshold_search
from .sim import ConfigError, SimConfig, run_ber_sweep, write_csv


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--seed", type=int, help="override the master seed")
    parser.add_argument("--threads", type=int, help="worker thread count")
    parser.add_argument("--out", help="output file path")


def _channel_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--channel", choices=["biawgn", "bicm"], default="biawgn")
    parser.add_argument("--M", type=int, default=4, help="BICM constellation points per dimension")


def _load_table(path: str | None) -> TransitionTable:
    if path is None:
        raise ConfigError("--table: required")
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"--table: file not found: {p}")
    return TransitionTable.from_json(p.read_text())


def _model_family(table: TransitionTable, channel: str, points_per_dim: int):
    code = cached_code(table.v, table.t)
    rate = (code.k / code.n) ** 2
    bits_per_dim = 1 if channel == "biawgn" else int(math.log2(points_per_dim))

    def family(ebn0_db: float):
        sigma = ebn0_to_sigma(ebn0_db, rate, bits_per_dim=bits_per_dim, kind=channel)
        if channel == "biawgn":
            model = ChannelModel.biawgn(sigma)
        else:
            model = ChannelModel.bicm(points_per_dim, sigma)
        return mixture_model(model)

    return family


def _cmd_transition_table(args) -> int:
    if args.out is None:
        raise ConfigError("--out: required")
    code = cached_code(args.v, args.t)
    seed = args.seed if args.seed is not None else 0
    table = estimate_transition_table(code, samples_per_weight=args.samples, seed=seed)
    Path(args.out).write_text(table.to_json())
    print(f"wrote transition table for (n={code.n}, k={code.k}, t={code.t}) to {args.out}")
    return 0


def _cmd_de_run(args) -> int:
    table = _load_table(args.table)
    family = _model_family(table, args.channel, args.M)
    traj = de_run(table, family(args.ebn0), max_iters=args.iters, min_iters=args.min_iters)
    lines = ["iteration,x_row,x_col"
             + "".join(f",mu_row_{c}" for c in range(6))
             + "".join(f",mu_col_{c}" for c in range(6))]
    for i in range(traj.iterations):
        mu_r = ",".join(repr(float(v)) for v in traj.row_mu[i])
        mu_c = ",".join(repr(float(v)) for v in traj.col_mu[i])
        lines.append(f"{i + 1},{traj.x_row[i]:.12e},{traj.x_col[i]:.12e},{mu_r},{mu_c}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    status = "converged" if traj.converged else ("stalled" if traj.stalled else "iteration cap")
    print(f"# x0={traj.x0:.6e} final_x={traj.final_x:.6e} ({status})", file=sys.stderr)
    return 0


def _cmd_de_threshold(args) -> int:
    table = _load_table(args.table)
    family = _model_family(table, args.channel, args.M)
    thr = threshold_search(table, family, (args.bracket[0], args.bracket[1]),
                           target_x=args.target_x, tol_db=args.tol)
    print(f"threshold_ebn0_db={thr:.4f}")
    if args.out:
        import json

        Path(args.out).write_text(json.dumps({
            "threshold_ebn0_db": thr,
            "bracket_db": list(args.bracket),
            "tol_db": args.tol,
            "target_x": args.target_x,
        }))
    return 0


def _cmd_export_lut(args) -> int:
    if args.out is None:
        raise ConfigError("--out: required")
    table = _load_table(args.table)
    family = _model_family(table, args.channel, args.M)
    traj = de_run(table, family(args.ebn0), max_iters=max(args.iterations, 200),
                  min_iters=args.iterations)
    lut = export_lut(traj, args.iterations, shared_row_col=not args.separate_row_col,
                     clamp=args.clamp, design_snr_db=args.ebn0)
    Path(args.out).write_text(lut.to_json())
    print(f"wrote {args.iterations}-iteration LUT (design Eb/N0 {args.ebn0:g} dB) to {args.out}")
    return 0


def _cmd_design_quantizer(args) -> int:
    if args.out is None:
        raise ConfigError("--out: required")
    if args.esn0 is not None:
        sigma = esn0_db_to_sigma(args.esn0)
    elif args.ebn0 is not None and args.rate is not None:
        bits_per_dim = 1 if args.channel == "biawgn" else int(math.log2(args.M))
        sigma = ebn0_to_sigma(args.ebn0, args.rate, bits_per_dim=bits_per_dim, kind=args.channel)
    else:
        raise ConfigError("--esn0 (or --ebn0 together with --rate): required")
    if args.channel == "biawgn":
        model = ChannelModel.biawgn(sigma)
    else:
        model = ChannelModel.bicm(args.M, sigma)
    quant = lloyd_max_design(mixture_model(model), args.bits)
    Path(args.out).write_text(quant.to_json())
    print(f"wrote {args.bits}-bit Lloyd-Max quantizer to {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    if args.config is None:
        raise ConfigError("--config: required")
    if args.out is None:
        raise ConfigError("--out: required")
    cfg = SimConfig.from_json_file(args.config)
    if args.seed is not None:
        cfg.master_seed = args.seed
    results = run_ber_sweep(cfg, threads=args.threads, progress=True)
    write_csv(results, args.out, timing=args.timing)
    print(f"wrote {len(results)} sweep points to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcfec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transition-table", help="estimate component decode-outcome table")
    _common(p)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--samples", type=int, default=20_000, help="samples per error weight")
    p.set_defaults(func=_cmd_transition_table)

    p = sub.add_parser("de-run", help="record one density-evolution trajectory as CSV")
    _common(p)
    _channel_args(p)
    p.add_argument("--table", required=True)
    p.add_argument("--ebn0", type=float, required=True)
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--min-iters", type=int, default=1)
    p.set_defaults(func=_cmd_de_run)

    p = sub.add_parser("de-threshold", help="bisect the density-evolution threshold")
    _common(p)
    _channel_args(p)
    p.add_argument("--table", required=True)
    p.add_argument("--bracket", type=float, nargs=2, required=True, metavar=("LO_DB", "HI_DB"))
    p.add_argument("--tol", type=float, default=0.005)
    p.add_argument("--target-x", type=float, default=1e-10)
    p.set_defaults(func=_cmd_de_threshold)

    p = sub.add_parser("export-lut", help="export per-iteration combining offsets")
    _common(p)
    _channel_args(p)
    p.add_argument("--table", required=True)
    p.add_argument("--ebn0", type=float, required=True, help="design Eb/N0 in dB")
    p.add_argument("--iterations", type=int, default=10)
    p.add_argument("--clamp", type=float, default=64.0)
    p.add_argument("--separate-row-col", action="store_true",
                   help="export distinct row/column tables instead of sharing")
    p.set_defaults(func=_cmd_export_lut)

    p = sub.add_parser("design-quantizer", help="design a Lloyd-Max LLR quantizer")
    _common(p)
    _channel_args(p)
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--esn0", type=float, help="design Es/N0 in dB")
    p.add_argument("--ebn0", type=float, help="design Eb/N0 in dB (needs --rate)")
    p.add_argument("--rate", type=float, help="code rate for --ebn0")
    p.set_defaults(func=_cmd_design_quantizer)

    p = sub.add_parser("simulate", help="run a Monte Carlo BER sweep to CSV")
    _common(p)
    p.add_argument("--timing", action="store_true",
                   help="write measured wall seconds (breaks byte-identical reruns)")
    p.set_defaults(func=_cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - boundary: report and exit nonzero
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
