"""Command-line interface.

Subcommands: ``estimate`` (one study from flags), ``tables`` (scaling
constants as CSV), ``simulate`` (relative-error studies as CSV) and
``batch`` (CSV-in, enriched-CSV-out).  Machine output goes to the
requested path or stdout; diagnostics go to stderr.  Exit status is 0
exactly when the requested work completed.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import batch_io, estimators, order_stats, simulation

_METHOD_TOKENS = ", ".join(m.value for m in estimators.MethodId)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _q_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or any(q < 1 for q in values):
        raise argparse.ArgumentTypeError("Q values must be positive integers")
    return values


def _method_list(text: str) -> list[estimators.MethodId]:
    try:
        return [estimators.MethodId(tok.strip()) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown method token in {text!r}; valid: {_METHOD_TOKENS}")


def _parse_dist(text: str) -> simulation.DistributionSpec:
    kinds = {
        "normal": (simulation.Normal, 2),
        "lognormal": (simulation.LogNormal, 2),
        "beta": (simulation.Beta, 2),
        "exponential": (simulation.Exponential, 1),
        "weibull": (simulation.Weibull, 2),
    }
    name, _, rest = text.partition(":")
    if name not in kinds:
        raise argparse.ArgumentTypeError(
            f"unknown distribution {name!r}; expected one of {sorted(kinds)}"
        )
    cls, arity = kinds[name]
    parts = [p for p in rest.split(":") if p]
    if len(parts) != arity:
        raise argparse.ArgumentTypeError(
            f"{name} takes {arity} parameter(s), e.g. "
            + ("exponential:10" if arity == 1 else f"{name}:a:b")
        )
    try:
        return cls(*(float(p) for p in parts))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="summstat",
        description="Estimate sample mean/SD from reported summary statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate one study from flags")
    est.add_argument("--n", type=_positive_int, required=True, help="sample size")
    est.add_argument("--min", type=float, default=None, help="reported minimum")
    est.add_argument("--q1", type=float, default=None, help="reported first quartile")
    est.add_argument("--median", type=float, required=True, help="reported median")
    est.add_argument("--q3", type=float, default=None, help="reported third quartile")
    est.add_argument("--max", type=float, default=None, help="reported maximum")
    est.add_argument("--mean-method", default=None, metavar="TOKEN",
                     help=f"one of: {_METHOD_TOKENS}")
    est.add_argument("--sd-method", default=None, metavar="TOKEN",
                     help=f"one of: {_METHOD_TOKENS}")

    tab = sub.add_parser("tables", help="emit the xi/eta scaling tables as CSV")
    tab.add_argument("--kind", choices=("xi", "eta"), required=True)
    tab.add_argument("--max", type=_positive_int, required=True, metavar="INDEX",
                     help="largest n (xi) or Q (eta) to tabulate")
    tab.add_argument("--out", default=None, help="output path (default: stdout)")

    sim = sub.add_parser("simulate", help="run a relative-error study, emit CSV")
    sim.add_argument("--study", required=True,
                     choices=("c1-normal", "c1-skewed", "c2", "c3", "custom"))
    sim.add_argument("--reps", type=_positive_int, default=1000,
                     help="replications per grid point (default 1000)")
    sim.add_argument("--seed", type=int, default=simulation.DEFAULT_SEED,
                     help=f"master seed (default {simulation.DEFAULT_SEED})")
    sim.add_argument("--out", default=None, help="output path (default: stdout)")
    sim.add_argument("--q-list", type=_q_list, default=None, metavar="Q,Q,...",
                     help="explicit Q grid (sample sizes are n = 4Q+1)")
    sim.add_argument("--q-max", type=_positive_int, default=None,
                     help="use the Q grid 1..Q_MAX instead of the study default")
    sim.add_argument("--sd-methods", type=_method_list, default=None, metavar="TOK,TOK",
                     help="override the SD methods of a single-scenario study")
    sim.add_argument("--dist-filter", default=None, metavar="SUBSTR",
                     help="restrict a preset study to matching distributions")
    sim.add_argument("--dist", type=_parse_dist, default=None, metavar="KIND:P1[:P2]",
                     help="custom study distribution, e.g. lognormal:5:1")
    sim.add_argument("--scenario", choices=("c1", "c2", "c3"), default=None,
                     help="custom study scenario")

    bat = sub.add_parser("batch", help="enrich a CSV of study records")
    bat.add_argument("--input", required=True)
    bat.add_argument("--output", required=True)
    bat.add_argument("--mean-method", default=None, metavar="TOKEN")
    bat.add_argument("--sd-method", default=None, metavar="TOKEN")

    return parser


def _cmd_estimate(args) -> int:
    record = batch_io.StudyRecord(
        study_id="",
        n=args.n,
        min=args.min,
        q1=args.q1,
        median=args.median,
        q3=args.q3,
        max=args.max,
    )
    enriched = batch_io.enrich(record, args.mean_method, args.sd_method)
    print(f"scenario: {enriched.scenario}")
    print(f"mean: {enriched.est_mean!r} ({enriched.mean_method.value})")
    print(f"sd: {enriched.est_sd!r} ({enriched.sd_method.value})")
    print(f"flags: {';'.join(enriched.flags) if enriched.flags else '(none)'}")
    return 0


def _cmd_tables(args) -> int:
    table = order_stats.generate_table(args.kind, args.max)
    if args.out:
        with open(args.out, "w") as stream:
            table.write_csv(stream)
    else:
        table.write_csv(sys.stdout)
    return 0


def _workers_from_env() -> int:
    raw = os.environ.get("SUMMSTAT_THREADS")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"SUMMSTAT_THREADS must be an integer, got {raw!r}") from None


def _cmd_simulate(args) -> int:
    q_values = args.q_list if args.q_list is not None else (
        list(range(1, args.q_max + 1)) if args.q_max else None
    )
    if args.study == "custom":
        if args.dist is None or args.scenario is None:
            raise ValueError("--study custom requires --dist and --scenario")
        scenario = args.scenario.upper()
        default_pair = estimators.DEFAULT_METHODS[scenario]
        pairs = (
            [(estimators.MethodId.MEAN_SIMPLE, sd) for sd in args.sd_methods]
            if args.sd_methods
            else [default_pair]
        )
        configs = [
            simulation.SimulationConfig(
                dist=args.dist,
                n_grid=tuple(4 * q + 1 for q in (q_values or range(1, 26))),
                reps=args.reps,
                master_seed=args.seed,
                methods={scenario: pairs},
            )
        ]
    else:
        configs = simulation.preset_study(
            args.study,
            reps=args.reps,
            master_seed=args.seed,
            q_values=q_values,
            sd_methods=args.sd_methods,
            dist_filter=args.dist_filter,
        )
    cells = simulation.run_study(configs, workers=_workers_from_env())
    if args.out:
        with open(args.out, "w") as stream:
            simulation.write_cells_csv(cells, stream)
    else:
        simulation.write_cells_csv(cells, sys.stdout)
    return 0


def _cmd_batch(args) -> int:
    counts = batch_io.process_file(args.input, args.output, args.mean_method, args.sd_method)
    print(f"processed={counts.processed} enriched={counts.enriched} rejected={counts.rejected}")
    return 0


_COMMANDS = {
    "estimate": _cmd_estimate,
    "tables": _cmd_tables,
    "simulate": _cmd_simulate,
    "batch": _cmd_batch,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
