"""Command-line front end: run experiments, emit CSV, print a summary table."""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .experiments import (
    ConfigError,
    config_from_json,
    run_experiment,
    write_csv,
)
from .hermite import (
    assert_expansion_trends,
    coefficient_limit_report,
    write_report_csv,
)
from .quantization import distortion_for_bits

__all__ = ["main", "run"]

USAGE_ERROR = 2
CONFIG_ERROR = 3


def _resolve_threads(flag_value: int | None) -> int:
    if flag_value is not None:
        return max(1, flag_value)
    env = os.environ.get("QUANTLINK_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"QUANTLINK_THREADS is not an integer: {env!r}") from exc
    return os.cpu_count() or 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantlink",
        description="Link-level Monte-Carlo experiments for low-resolution quantized MIMO.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("mse", "mean-square error vs Eb/N0"),
        ("ber", "bit error rate vs Eb/N0"),
        ("se", "sum spectral efficiency with estimated channels"),
        ("collision", "sign-quantizer block-collision study"),
    ):
        sp = sub.add_parser(name, help=blurb)
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--out", required=True, help="output CSV path")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")
        sp.add_argument("--threads", type=int, default=None, help="worker count")
    hr = sub.add_parser("hermite-report", help="expansion coefficient and distortion tables")
    hr.add_argument("--bits", default="1,2,3", help="comma-separated resolutions")
    hr.add_argument("--out", default=None, help="optional CSV path for the table")
    hr.add_argument("--offset", type=float, default=0.1, help="threshold offset for the asymmetric table")
    return parser


def _print_summary(records) -> None:
    header = f"{'experiment':<10} {'equalizer':<11} {'bits':>4} {'ebn0_db':>8} {'value':>12} {'ci95':>9} {'trials':>8}"
    print(header)
    print("-" * len(header))
    for rec in records:
        print(
            f"{rec.experiment:<10} {rec.equalizer:<11} {rec.bits:>4} "
            f"{rec.ebn0_db:>8.2f} {rec.value:>12.4f} {rec.ci95:>9.4f} {rec.trials:>8}"
        )


def _run_hermite_report(args) -> int:
    try:
        bits = [int(tok) for tok in args.bits.split(",") if tok.strip()]
    except ValueError:
        print(f"error: --bits must be a comma-separated integer list, got {args.bits!r}", file=sys.stderr)
        return USAGE_ERROR
    if not bits:
        print("error: --bits produced an empty list", file=sys.stderr)
        return USAGE_ERROR

    symmetric = coefficient_limit_report(bits)
    asymmetric = coefficient_limit_report(bits, threshold_offset=args.offset)
    assert_expansion_trends(symmetric)
    assert_expansion_trends(asymmetric, check_gain=False)

    print(f"{'b':>2} {'lambda':>10} {'rho':>10} {'omega2(sym)':>12} {'omega2(offset)':>15} {'residual_l2':>12}")
    for sym, asym in zip(symmetric, asymmetric):
        rho = distortion_for_bits(sym.bits)
        print(
            f"{sym.bits:>2} {sym.lam:>10.6f} {rho:>10.6f} {sym.omega2:>12.3e} "
            f"{asym.omega2:>15.6e} {sym.residual_l2:>12.6f}"
        )
    if args.out:
        write_report_csv(symmetric, args.out)
        print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "hermite-report":
        try:
            return _run_hermite_report(args)
        except Exception as exc:  # report assertion or IO failures as runtime errors
            print(f"error: {exc}", file=sys.stderr)
            return 1

    try:
        cfg = config_from_json(args.config)
        if cfg.experiment != args.command:
            raise ConfigError(
                f"config experiment {cfg.experiment!r} does not match subcommand {args.command!r}"
            )
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        threads = _resolve_threads(args.threads)
        records = run_experiment(cfg, threads=threads)
        write_csv(records, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    _print_summary(records)
    print(f"wrote {args.out}")
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
