"""Command-line harness: gen, solve, bench, plotdata, oracle-check."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .bench import (
    CONFIG_SCHEMA,
    ExperimentConfig,
    emit_convergence_plotdata,
    oracle_check,
    run_matrix,
    schedule_from_json,
)
from .errors import CfeasError, InvalidSpec
from .operators import KernelSpec
from .problems import generate, load_pair, save_pair
from .solver import (
    STATUS_CONVERGED,
    IterationRecord,
    SolveTrace,
    SolverConfig,
    solve,
    write_trace_csv,
)

EXIT_OK = 0
EXIT_RUN_FAILURE = 1
EXIT_USAGE = 2


def _add_generator_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--family",
        choices=["matrix_completion", "ellipsoids", "halfspace_wedge"],
        required=True,
    )
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--rank", type=int, default=3)
    p.add_argument("--obs-frac", type=float, default=0.4)
    p.add_argument("--cond", type=float, default=20.0)
    p.add_argument("--tangency-gap", type=float, default=1e-3)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)


def _generator_params(args) -> dict:
    if args.family == "matrix_completion":
        return {"n": args.n, "rank": args.rank, "obs_frac": args.obs_frac}
    if args.family == "ellipsoids":
        return {"n": args.n, "cond": args.cond, "tangency_gap": args.tangency_gap}
    return {"n": args.n, "theta": args.theta}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfeas",
        description="Two-set convex feasibility: circumcentered solvers and benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="materialize an instance as JSON")
    _add_generator_args(gen)
    gen.add_argument("--out", required=True)

    slv = sub.add_parser("solve", help="solve one instance and dump its trace")
    slv.add_argument("--instance", help="instance JSON from `gen`")
    slv.add_argument("--family", choices=["matrix_completion", "ellipsoids", "halfspace_wedge"])
    slv.add_argument("--n", type=int, default=30)
    slv.add_argument("--rank", type=int, default=3)
    slv.add_argument("--obs-frac", type=float, default=0.4)
    slv.add_argument("--cond", type=float, default=20.0)
    slv.add_argument("--tangency-gap", type=float, default=1e-3)
    slv.add_argument("--theta", type=float, default=1.0)
    slv.add_argument("--seed", type=int, default=0)
    slv.add_argument("--method", choices=["crm", "map"], default="crm")
    slv.add_argument("--kernel", default="XY")
    slv.add_argument(
        "--schedule",
        default="constant:0.5",
        help="constant:A | vanishing | table:A,B,...",
    )
    slv.add_argument("--eps", type=float, default=1e-8)
    slv.add_argument("--max-iter", type=int, default=100_000)
    slv.add_argument("--trace-out")

    ben = sub.add_parser("bench", help="run an experiment matrix from a config file")
    ben.add_argument("--config")
    ben.add_argument("--print-schema", action="store_true")
    ben.add_argument("--jobs", type=int, default=1)
    ben.add_argument("--out", help="override output directory")
    ben.add_argument("--seed-range", help="A..B inclusive, overrides config seeds")
    ben.add_argument("--eps", type=float)
    ben.add_argument("--max-iter", type=int)

    plo = sub.add_parser("plotdata", help="long-format method,k,delta CSV from traces")
    plo.add_argument("--run-dir", required=True, help="directory with trace_*.csv files")
    plo.add_argument("--out", required=True)

    orc = sub.add_parser("oracle-check", help="run brute-force oracle comparisons")
    orc.add_argument("suite", choices=["projections", "circumcenter", "invariants"])
    orc.add_argument("--seed-range", default="0..9")

    return parser


def _parse_schedule(text: str):
    kind, _, rest = text.partition(":")
    if kind == "constant":
        return schedule_from_json({"kind": "constant", "alpha": float(rest or 0.5)})
    if kind == "vanishing":
        return schedule_from_json({"kind": "vanishing"})
    if kind == "table":
        return schedule_from_json(
            {"kind": "table", "values": [float(v) for v in rest.split(",")]}
        )
    raise InvalidSpec(f"unknown schedule {text!r}")


def _parse_seed_range(text: str):
    lo, _, hi = text.partition("..")
    return list(range(int(lo), int(hi) + 1))


def _cmd_gen(args) -> int:
    pair = generate(args.family, args.seed, **_generator_params(args))
    save_pair(pair, args.out)
    print(f"wrote {args.out} ({args.family}, seed {args.seed}, dim {pair.dim})")
    return EXIT_OK


def _cmd_solve(args) -> int:
    if args.instance:
        pair = load_pair(args.instance)
    elif args.family:
        pair = generate(args.family, args.seed, **_generator_params(args))
    else:
        print("solve needs --instance or --family", file=sys.stderr)
        return EXIT_USAGE
    cfg = SolverConfig(
        method=args.method,
        kernel=KernelSpec.from_string(args.kernel),
        schedule=_parse_schedule(args.schedule),
        eps=args.eps,
        max_iter=args.max_iter,
    )
    trace = solve(pair, cfg)
    if args.trace_out:
        write_trace_csv(trace, args.trace_out)
    print(
        f"status={trace.status} iterations={trace.iterations} "
        f"final_delta={trace.final_delta:.3e} "
        f"projections={trace.total_algorithmic_projections}"
    )
    return EXIT_OK if trace.status == STATUS_CONVERGED else EXIT_RUN_FAILURE


def _cmd_bench(args) -> int:
    if args.print_schema:
        json.dump(CONFIG_SCHEMA, sys.stdout, indent=2)
        print()
        return EXIT_OK
    if not args.config:
        print("bench needs --config (or --print-schema)", file=sys.stderr)
        return EXIT_USAGE
    with open(args.config) as fh:
        doc = json.load(fh)
    if args.seed_range:
        doc["seeds"] = _parse_seed_range(args.seed_range)
    if args.eps is not None:
        doc["eps"] = args.eps
    if args.max_iter is not None:
        doc["max_iter"] = args.max_iter
    if args.out:
        doc["output_dir"] = args.out
    config = ExperimentConfig.from_json(doc)
    summary, report = run_matrix(config, jobs=args.jobs)
    for row in summary:
        print(
            f"{row['method']}: mean_iters={row['mean_iters']:.1f} "
            f"mean_final_delta={row['mean_final_delta']:.3e} "
            f"mean_projections={row['mean_projections']:.1f}"
        )
    if report["failures"]:
        print(f"{len(report['failures'])} failed runs:", file=sys.stderr)
        for f in report["failures"]:
            print(f"  {f['method']} seed {f['seed']}: {f['error']}", file=sys.stderr)
        return EXIT_RUN_FAILURE
    return EXIT_OK


def _cmd_plotdata(args) -> int:
    traces = {}
    for name in sorted(os.listdir(args.run_dir)):
        if not (name.startswith("trace_") and name.endswith(".csv")):
            continue
        label = name[len("trace_"):-len(".csv")]
        records = []
        with open(os.path.join(args.run_dir, name)) as fh:
            for row in csv.DictReader(fh):
                records.append(
                    IterationRecord(
                        k=int(row["k"]),
                        delta=float(row["delta"]),
                        dist_sref=float(row["dist_sref"]) if row["dist_sref"] else None,
                        centralization_ip=float("nan"),
                        alpha=float(row["alpha"]) if row["alpha"] else float("nan"),
                        cum_proj_alg=int(row["cum_proj_alg"]),
                        cum_proj_diag=int(row["cum_proj_diag"]),
                        wall_ns=int(row["wall_ns"]),
                    )
                )
        traces[label] = SolveTrace(
            records=records,
            status="unknown",
            final_point=None,
            iterations=records[-1].k if records else 0,
        )
    if not traces:
        print(f"no trace_*.csv files in {args.run_dir}", file=sys.stderr)
        return EXIT_RUN_FAILURE
    emit_convergence_plotdata(traces, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_oracle_check(args) -> int:
    report = oracle_check(args.suite, _parse_seed_range(args.seed_range))
    json.dump(report, sys.stdout, indent=2)
    print()
    return EXIT_OK if report["ok"] else EXIT_RUN_FAILURE


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "plotdata":
            return _cmd_plotdata(args)
        if args.command == "oracle-check":
            return _cmd_oracle_check(args)
    except InvalidSpec as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CfeasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUN_FAILURE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
