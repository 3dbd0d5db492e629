"""Command-line interface: sweeps, bank building, ordering, efficiency.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

import argparse
import math
import sys

from . import __version__
from .channel import synthesize_channel
from .codec import build_bank, save_bank, spectral_efficiency
from .config import load_settings
from .harness import (
    ConfigError,
    ResultTable,
    run_offset_hist,
    run_order,
    run_pam,
    run_semantic,
    run_ser_vs_rate,
    run_ser_vs_spacing,
    write_table,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmfsk",
        description="Frequency-fingerprint communication simulator for multimode fiber.",
    )
    parser.add_argument("--version", action="version", version=f"mmfsk {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key=value config file")
    common.add_argument("--seed", type=int, metavar="U64", help="master seed override")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="table format"
    )
    common.add_argument(
        "--plot", metavar="PATH", help="also render the table to a figure file"
    )
    common.add_argument(
        "--workers", type=int, default=1, metavar="N",
        help="parallel workers over sweep points (results are identical for any N)",
    )

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ser-spacing", parents=[common],
                   help="symbol error rate vs frequency spacing")
    sub.add_parser("ser-rate", parents=[common],
                   help="per-core and fused symbol error rate vs sampling rate")
    sub.add_parser("pam", parents=[common],
                   help="frequency and amplitude error rates with PAM levels")
    sub.add_parser("offsets", parents=[common],
                   help="error-offset histogram at an auto-tuned high-SER spacing")
    sub.add_parser("semantic", parents=[common],
                   help="classification error under greedy vs original ordering")

    order = sub.add_parser("order", parents=[common],
                           help="write the greedy similarity ordering of an embedding file")
    order.add_argument("embeddings", metavar="EMBEDDING_FILE")
    order.add_argument("--start", type=int, default=0,
                       help="original index placed first (default 0)")

    bank = sub.add_parser("bank-build", parents=[common],
                          help="build the fingerprint bank and write the bank file")

    eff = sub.add_parser("eff", parents=[common],
                         help="print the spectral efficiency in bits/s/Hz")
    eff.add_argument("--symbol-rate-hz", type=float, default=None)
    eff.add_argument("--bits-per-symbol", type=float, default=None)
    eff.add_argument("--spacing-hz", type=float, default=None)
    eff.add_argument("--channels", type=int, default=None)
    return parser


def _emit(table: ResultTable, args) -> None:
    write_table(table, args.out if args.out else sys.stdout, args.format)
    if args.plot:
        from .plots import render_table

        render_table(table, args.plot)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = load_settings(args.config, args.seed)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "ser-spacing":
            _emit(run_ser_vs_spacing(settings.sweep, workers=args.workers), args)
        elif args.command == "ser-rate":
            _emit(run_ser_vs_rate(settings.sweep, workers=args.workers), args)
        elif args.command == "pam":
            _emit(run_pam(settings.sweep), args)
        elif args.command == "offsets":
            _emit(run_offset_hist(settings.sweep, settings.offsets), args)
        elif args.command == "semantic":
            _emit(run_semantic(settings.sweep, settings.semantic), args)
        elif args.command == "order":
            if not args.out:
                print("config error: order requires --out", file=sys.stderr)
                return EXIT_CONFIG
            run_order(args.embeddings, args.start, args.out)
        elif args.command == "bank-build":
            if not args.out:
                print("config error: bank-build requires --out", file=sys.stderr)
                return EXIT_CONFIG
            channel = synthesize_channel(settings.sweep.fiber, settings.sweep.cores)
            bank = build_bank(channel, settings.sweep.alphabet, settings.sweep.rx)
            save_bank(bank, args.out)
        elif args.command == "eff":
            sweep = settings.sweep
            symbol_rate = args.symbol_rate_hz or 1.0 / sweep.rx.symbol_period_s
            bits = args.bits_per_symbol or math.log2(sweep.alphabet.size)
            spacing = args.spacing_hz or sweep.alphabet.spacing_hz
            channels = args.channels or sweep.alphabet.size
            value = spectral_efficiency(symbol_rate, bits, spacing, channels)
            print(f"{value:.6g}")
        else:  # pragma: no cover - argparse enforces the choices
            return EXIT_CONFIG
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except (RuntimeError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
