#!/usr/bin/env python3
"""
Arithmetic classes, diophantine approximation and the density of f^{-1}(C(a')).

Subcommands:
  sigma       - approximation profile sigma(alpha)_k for k = 0..K
  member      - decide alpha in C(a) up to a cutoff
  density     - density lower bounds of f^{-1}(C(a')) at the origin
  flow        - delta(g_t [alpha]) along a t-grid with lemma checks
  verify      - run the verification suite of bound checks
  plot-bands  - draw B(alpha, r) with its candidate bands

Exit codes: 0 success, 2 bound violated, 3 budget exhausted, 4 config error.
"""

import argparse
import json
import sys
from pathlib import Path

from core.config import OUT_DIR_ENV, apply_cli_overrides, load_config, validate_run_config
from core.display import display_artifacts, display_run_summary
from core.pipeline import run_command
from shared.errors import EXIT_OK, ArithDensityError
from shared.logger import get_logger

SUBCOMMANDS = ["sigma", "member", "density", "flow", "verify", "plot-bands"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arith-density",
        description="Arithmetic classes and the density of their preimages under curved maps",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=f"""
Examples:
  # Approximation profile of the defaults in config.json
  python arith_density.py sigma

  # Density curve from a run document, written to ./out
  python arith_density.py density --config run.json --out ./out

  # Verification suite with a different seed on 4 threads
  python arith_density.py verify --seed 7 --threads 4

The output directory can also be set with {OUT_DIR_ENV}.
        """
    )
    parser.add_argument('command', choices=SUBCOMMANDS, help='Subcommand to run')
    parser.add_argument('--config', type=str, help='Path to a run document (JSON)')
    parser.add_argument('--out', type=str, help='Output directory for reports')
    parser.add_argument('--seed', type=int, help='Seed for Monte-Carlo sampling (overrides config)')
    parser.add_argument('--threads', type=int, help='Worker threads (overrides config)')
    return parser


def report_error(error: ArithDensityError, output_dir: Path, command: str) -> int:
    """Machine-readable error on stdout and in <out>/error.json; returns the exit code"""
    document = error.to_dict()
    print(json.dumps(document, indent=2, ensure_ascii=False, default=str))
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
        with open(output_dir / "error.json", "w", encoding="utf-8") as f:
            json.dump(document, f, indent=2, ensure_ascii=False, default=str)
            f.write("\n")
    except OSError as e:
        print(f"  - Could not write error.json: {e}", file=sys.stderr)
    get_logger().log_exception(error, f"command '{command}'", {"output_dir": str(output_dir)})
    return error.exit_code


def main(argv=None) -> int:
    """
    Main entry point for arith-density.

    Loads and validates the configuration, runs one subcommand and maps
    library errors onto exit codes.
    """
    args = build_parser().parse_args(argv)
    command = args.command.replace("-", "_")
    output_dir = Path(args.out or ".")

    try:
        config = apply_cli_overrides(load_config(args.config), args.out, args.seed, args.threads)
        output_dir = Path(config.get("output_directory", "results"))
        get_logger().configure(str(output_dir / "logs"))

        if "_config_path" in config:
            print(f"Loaded config from: {config['_config_path']}")
        if "_local_config_path" in config:
            print(f"Local overrides from: {config['_local_config_path']}")

        validate_run_config(config, command)
        display_run_summary(config, args.command)
        artifacts = run_command(command, config, output_dir)
    except ArithDensityError as e:
        return report_error(e, output_dir, args.command)

    display_artifacts(artifacts)
    print(f"\nReports saved to: {output_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
