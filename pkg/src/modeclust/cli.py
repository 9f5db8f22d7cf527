"""Command-line interface: run, simulate, tables, and density debugging."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .data import load_matrix_csv
from .density import DEFAULT_KAPPA, taut_string
from .dipstat import (
    DEFAULT_GRIDS,
    DEFAULT_TABLE_SEED,
    DEFAULT_TRIALS,
    CritTable,
    build_crit_table,
    load_default_tables,
    verify_table,
)
from .pipeline import RunConfig, run_pipeline
from .simulate import scenario_one, simulate_mixture

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A002 - argparse API
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="modeclust", description="Modal projection clustering.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="cluster a numeric CSV matrix")
    run.add_argument("--input", required=True, help="CSV file with a header row")
    run.add_argument("--alpha", type=float, default=0.25, help="dip test level")
    run.add_argument("--m", type=int, default=25, help="minimum cluster size (>= 6)")
    run.add_argument("--gamma", type=float, default=4.0, help="noise spread divisor")
    run.add_argument("--iterations", type=int, default=1)
    run.add_argument("--candidates", type=int, default=200, help="candidate budget per search")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--vote", choices=("max", "runoff"), default="runoff",
                     help="vote mode written to the labels CSV")
    run.add_argument("--max-antimodes", type=int, default=100, dest="max_antimodes")
    run.add_argument("--pca", type=int, default=None,
                     help="rotate onto this many principal components first")
    run.add_argument("--out", required=True, help="JSON report path; a _labels.csv "
                     "file is written next to it")

    sim = sub.add_parser("simulate", help="draw a benchmark mixture to CSV")
    sim.add_argument("--scenario", type=int, default=1)
    sim.add_argument("--n", type=int, default=3000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True, help="matrix CSV path")
    sim.add_argument("--labels", required=True, help="true-label CSV path")

    tables = sub.add_parser("tables", help="build or verify calibration tables")
    tables_sub = tables.add_subparsers(dest="tables_command", required=True)
    build = tables_sub.add_parser("build", help="rebuild the Monte-Carlo tables")
    build.add_argument("--out-dir", required=True, dest="out_dir")
    build.add_argument("--threads", type=int, default=1)
    build.add_argument("--trials", type=int, default=None,
                       help="override the per-k default trial counts")
    verify = tables_sub.add_parser("verify", help="spot-check stored tables")
    verify.add_argument("--dir", default=None, help="table directory (default: bundled)")

    density = sub.add_parser("density", help="density-estimate debugging")
    density_sub = density.add_subparsers(dest="density_command", required=True)
    fit = density_sub.add_parser("fit", help="taut-string fit of one CSV column as JSON")
    fit.add_argument("input", help="CSV file with a header row")
    fit.add_argument("column", help="column name to fit")
    fit.add_argument("--kappa", type=float, default=DEFAULT_KAPPA)
    return parser


def _cmd_run(args) -> int:
    try:
        config = RunConfig(
            alpha=args.alpha,
            m=args.m,
            gamma=args.gamma,
            iterations=args.iterations,
            candidates=args.candidates,
            seed=args.seed,
            threads=args.threads,
            vote=args.vote,
            max_antimodes=args.max_antimodes,
            pca=args.pca,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    matrix, names = load_matrix_csv(args.input)
    tables = load_default_tables()
    report = run_pipeline(matrix, names, config, tables, progress=True)

    out_path = Path(args.out)
    out_path.write_text(report.to_json() + "\n")
    labels_path = out_path.with_name(out_path.stem + "_labels.csv")
    with open(labels_path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["row", "label"])
        for i, label in enumerate(report.chosen_labels()):
            writer.writerow([i, label])
    print(f"wrote {out_path} and {labels_path}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    if args.scenario != 1:
        raise ConfigError(f"unknown scenario {args.scenario}; only scenario 1 is available")
    if args.n < 1:
        raise ConfigError("--n must be positive")
    spec = scenario_one()
    matrix, labels = simulate_mixture(spec, args.n, args.seed)
    with open(args.out, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"c{j}" for j in range(matrix.shape[1])])
        for row in matrix:
            writer.writerow([repr(float(v)) for v in row])
    with open(args.labels, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["label"])
        for value in labels:
            writer.writerow([int(value)])
    print(f"wrote {args.out} ({matrix.shape[0]} rows) and {args.labels}")
    return EXIT_OK


def _cmd_tables(args) -> int:
    if args.tables_command == "build":
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for k in (1, 2, 3):
            trials = args.trials if args.trials is not None else DEFAULT_TRIALS[k]
            print(f"building k={k} table ({trials} trials)...", file=sys.stderr)
            table = build_crit_table(
                k, DEFAULT_GRIDS[k], trials, DEFAULT_TABLE_SEED, threads=args.threads
            )
            table.save(out_dir / f"dip_k{k}.npz")
        print(f"wrote tables to {out_dir}")
        return EXIT_OK

    if args.dir is None:
        tables = load_default_tables()
    else:
        tables = {
            k: CritTable.load(Path(args.dir) / f"dip_k{k}.npz") for k in (1, 2, 3)
        }
    for k, table in sorted(tables.items()):
        verify_table(table)
        print(f"k={k}: {table.n_grid.size} sizes x {table.trials} trials, seed {table.seed}: ok")
    return EXIT_OK


def _cmd_density(args) -> int:
    matrix, names = load_matrix_csv(args.input)
    if args.column not in names:
        raise ValueError(f"column {args.column!r} not in {args.input}: {', '.join(names)}")
    col = np.sort(matrix[:, names.index(args.column)])
    fit = taut_string(col, args.kappa)
    payload = {
        "column": args.column,
        "n": int(col.size),
        "kappa": fit.kappa,
        "radius": fit.radius,
        "knots_x": fit.knots_x.tolist(),
        "knots_y": fit.knots_y.tolist(),
        "density": fit.density.tolist(),
        "modes": [list(interval) for interval in fit.modes],
        "antimodes": [list(interval) for interval in fit.antimodes],
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "tables":
            return _cmd_tables(args)
        if args.command == "density":
            return _cmd_density(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
