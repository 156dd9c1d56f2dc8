"""
Command-line front end.

Verbs:
    gsvd      decompose a channel pair and print the subchannel partition
    solve     solve every scheme at one multicast target and print the best
    sweep     trace the GSVD rate region and write it as CSV
    baseline  compute the TDMA region
    oracle    compute the grid reference region (Nt, Nb, Ne <= 2)
    gen       generate a seeded channel pair file
    run       run a full experiment from a JSON configuration

Exit codes: 0 success, 2 infeasible, 3 numerical failure, 4 configuration error.

Usage:
    python -m src.app sweep --nt 3 --nb 4 --ne 3 --seed 1 --power-db 20 --out region.csv
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .algorithms.allocation import enumerate_schemes
from .algorithms.dc_solver import Infeasible, dc_solve
from .algorithms.gsvd import (
    ChannelPair,
    check_feasibility,
    classify_subchannels,
    expected_counts,
    generalized_singular_values,
    gsvd,
    reconstruction_residuals,
)
from .algorithms.rates import format_rates
from .errors import ConfigError, PhySiError, PhySiInfeasible
from .region.baseline import tdma_baseline
from .region.reference import grid_reference_region
from .region.pipeline import run_experiment
from .region.sweep import sweep_region
from .utils.config import DcConfig, PowerSpec, load_config
from .utils.data import resolve_channels, save_channel_pair, write_region_csv, write_trace_csv
from .utils.logging_setup import configure_logging

logger = logging.getLogger(__name__)

DEFAULT_DIMS = (3, 4, 3)


def _add_channel_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--nt", type=int, default=None, help="transmit antennas (default 3, or as in --channels)")
    parser.add_argument("--nb", type=int, default=None, help="authorized receiver antennas (default 4, or as in --channels)")
    parser.add_argument("--ne", type=int, default=None, help="unauthorized receiver antennas (default 3, or as in --channels)")
    parser.add_argument("--seed", type=int, default=0, help="channel seed")
    parser.add_argument("--channels", type=Path, default=None, help="channel matrix file (overrides --seed)")


def _add_power_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--power-db", type=float, default=None, help="power budget in dB (default 20)")
    group.add_argument("--power-linear", type=float, default=None, help="power budget, linear")
    parser.add_argument("--delta", type=float, default=0.1, help="multicast grid step in bits")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phy-si", description="GSVD precoding for integrated multicast and confidential service")
    parser.add_argument("--log-level", default="INFO", help="DEBUG, INFO, WARNING or ERROR")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("gsvd", help="decompose a channel pair")
    _add_channel_args(p)

    p = sub.add_parser("solve", help="best scheme at one multicast target")
    _add_channel_args(p)
    _add_power_args(p)
    p.add_argument("--r-ms", type=float, required=True, help="multicast target in bits")
    p.add_argument("--trace", type=Path, default=None, help="write the DC trace of the best scheme as CSV")

    p = sub.add_parser("sweep", help="GSVD rate region")
    _add_channel_args(p)
    _add_power_args(p)
    p.add_argument("--verify-removals", action="store_true", help="re-test removed schemes")
    p.add_argument("--out", type=Path, default=Path("gsvd_region.csv"))

    p = sub.add_parser("baseline", help="TDMA rate region")
    _add_channel_args(p)
    _add_power_args(p)
    p.add_argument("--out", type=Path, default=Path("tdma_region.csv"))

    p = sub.add_parser("oracle", help="grid reference region for Nt, Nb, Ne <= 2")
    _add_channel_args(p)
    _add_power_args(p)
    p.add_argument("--grid", type=int, default=100, help="power steps across the budget")
    p.add_argument("--dictionary", choices=["full", "gsvd"], default="full")
    p.add_argument("--out", type=Path, default=Path("grid_reference.csv"))

    p = sub.add_parser("gen", help="generate a channel pair file")
    _add_channel_args(p)
    p.add_argument("--out", type=Path, default=Path("channels.txt"))

    p = sub.add_parser("run", help="run an experiment configuration")
    p.add_argument("config", type=Path, help="JSON configuration")

    return parser


def _power(args: argparse.Namespace) -> float:
    if args.power_linear is not None:
        spec = {"value": args.power_linear, "unit": "linear"}
    else:
        spec = {"value": 20.0 if args.power_db is None else args.power_db, "unit": "dB"}
    try:
        return PowerSpec(**spec).linear
    except ValueError as exc:
        raise ConfigError(f"Invalid power: {exc}") from exc


def _dims(args: argparse.Namespace) -> Tuple[int, int, int]:
    given = (args.nt, args.nb, args.ne)
    return tuple(DEFAULT_DIMS[i] if v is None else v for i, v in enumerate(given))


def _channels(args: argparse.Namespace) -> ChannelPair:
    # A channel file fixes the dimensions; only counts given explicitly are checked against it.
    if args.channels is not None:
        return resolve_channels(args.nt, args.nb, args.ne, args.seed, args.channels)
    return resolve_channels(*_dims(args), args.seed)


def cmd_gsvd(args: argparse.Namespace) -> int:
    pair = _channels(args)
    f = gsvd(pair)
    part = classify_subchannels(f)
    report = check_feasibility(f, part)
    row = expected_counts(pair.nt, pair.nb, pair.ne)
    residuals = reconstruction_residuals(pair, f)

    print(f"Configuration:    {row.label} (generic counts cc={row.cc} pc1={row.pc1} pc2={row.pc2})")
    print(f"c^2:              {np.array2string(f.c_sq, precision=6)}")
    print(f"d^2:              {np.array2string(f.d_sq, precision=6)}")
    print(f"c/d:              {np.array2string(generalized_singular_values(f), precision=6)}")
    print(f"CC / PC1 / PC2:   {list(part.cc)} / {list(part.pc1)} / {list(part.pc2)}")
    print(f"Residual H1, H2:  {residuals['h1']:.3e}, {residuals['h2']:.3e}")
    print(f"Feasibility:      {report.describe()}")
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    pair = _channels(args)
    p_budget = _power(args)
    f = gsvd(pair)
    part = classify_subchannels(f)
    report = check_feasibility(f, part)
    if not report.phy_si_feasible:
        raise PhySiInfeasible(report.describe())

    best = None
    for scheme_id, alloc in enumerate_schemes(f, part):
        outcome = dc_solve(f, alloc, args.r_ms, p_budget, DcConfig())
        if isinstance(outcome, Infeasible):
            print(f"scheme {scheme_id}: infeasible ({outcome.reason})")
            continue
        print(f"scheme {scheme_id}: secrecy rate {outcome.secrecy_rate:.6f}")
        if best is None or outcome.secrecy_rate > best[2].secrecy_rate:
            best = (scheme_id, alloc, outcome)

    if best is None:
        raise PhySiInfeasible(f"no scheme meets the multicast target {args.r_ms:g}")
    scheme_id, alloc, solution = best
    print(f"\nBest scheme: {scheme_id}")
    print(format_rates(solution, alloc))
    if args.trace is not None:
        write_trace_csv(solution, args.trace)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    region = sweep_region(
        _channels(args), _power(args), args.delta, DcConfig(), verify_removals=args.verify_removals
    )
    write_region_csv(region, args.out)
    print(f"Wrote {len(region)} boundary points to {args.out}")
    return 0


def cmd_baseline(args: argparse.Namespace) -> int:
    region = tdma_baseline(_channels(args), _power(args), DcConfig(), args.delta)
    write_region_csv(region, args.out)
    r_mc, r_c = region.diagnostics["r_mc_max"], region.diagnostics["r_c_max"]
    print(f"TDMA: multicast max {r_mc:.6f}, confidential max {r_c:.6f}; wrote {args.out}")
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    region = grid_reference_region(
        _channels(args), _power(args), args.grid, args.delta, dictionary=args.dictionary, seed=args.seed
    )
    write_region_csv(region, args.out)
    print(f"Wrote {len(region)} reference points to {args.out}")
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    nt, nb, ne = _dims(args)
    path = save_channel_pair(resolve_channels(nt, nb, ne, args.seed), args.out)
    print(f"Wrote {nt}x{nb}x{ne} channel pair to {path}")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    result = run_experiment(load_config(args.config))
    failed = [t for t in result.trials if t.error]
    print(f"Manifest: {result.manifest_path} ({len(result.trials) - len(failed)}/{len(result.trials)} trials ok)")
    for t in failed:
        print(f"  trial {t.trial}: {t.error}", file=sys.stderr)
    return result.exit_code


COMMANDS = {
    "gsvd": cmd_gsvd,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "baseline": cmd_baseline,
    "oracle": cmd_oracle,
    "gen": cmd_gen,
    "run": cmd_run,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch to a verb and map errors to exit codes."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        configure_logging(args.log_level)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ConfigError.exit_code

    try:
        return COMMANDS[args.verb](args)
    except PhySiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
