"""Command-line interface: run experiments, regenerate tables, compare series.

Exit codes: 0 success, 2 configuration error, 3 capacity limit,
4 numeric failure (including a failed comparison or table mismatch).
Failures also emit one machine-readable JSON error record on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import CapacityError, ConfigError, NumericsError
from .experiments import compare, emit_tables, load_config, load_series_csv, run, write_outputs

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_NUMERIC = 4


def _error_record(category: str, message: str) -> None:
    print(json.dumps({"error": {"category": category, "message": message}}), file=sys.stderr)


def _cmd_run(args) -> int:
    config = load_config(args.config)
    series = run(config, seed=args.seed)
    csv_path, json_path = write_outputs(series, config, args.out)
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return EXIT_OK


def _cmd_tables(args) -> int:
    report = emit_tables()
    print(report.render())
    return EXIT_OK if report.all_match else EXIT_NUMERIC


def _cmd_compare(args) -> int:
    series_a = load_series_csv(args.series_a)
    series_b = load_series_csv(args.series_b)
    report = compare(series_a, series_b, args.tol, args.col_a, args.col_b)
    print(report.render())
    return EXIT_OK if report.passed else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinchain",
        description="Trotterized time evolution of the J1-J2 Heisenberg chain",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configured experiment")
    p_run.add_argument("--config", required=True, help="experiment config file")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_tables = sub.add_parser("tables", help="regenerate gate-count tables and diff goldens")
    p_tables.set_defaults(func=_cmd_tables)

    p_cmp = sub.add_parser("compare", help="compare two series CSVs")
    p_cmp.add_argument("series_a")
    p_cmp.add_argument("series_b")
    p_cmp.add_argument("--tol", type=float, required=True)
    p_cmp.add_argument("--col-a", default=None, help="column of the first series")
    p_cmp.add_argument("--col-b", default=None, help="column of the second series")
    p_cmp.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _error_record("config", str(exc))
        return EXIT_CONFIG
    except CapacityError as exc:
        _error_record("capacity", str(exc))
        return EXIT_CAPACITY
    except (NumericsError, ValueError) as exc:
        _error_record("numeric", str(exc))
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
