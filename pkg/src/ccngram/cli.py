"""Command-line experiment runner.

    ccngram run --scenario fig4.scn --sweep rate=50,100,500,2000
    ccngram sweep --scenario fig1.scn --axis alpha=0.7,1.0 --seeds 1,2,3
    ccngram validate --scenario fig4.scn
    ccngram trace-dump --scenario tiny.scn --plane gram --out trace.ndjson
"""
from __future__ import annotations

import argparse
import dataclasses
import itertools
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import scenario as sc
from .experiment import Run
from .metrics import write_csv

OUT_ENV = "CCNGRAM_OUT"


def full_scale(s: sc.Scenario) -> sc.Scenario:
    """The published topology and workload sizes."""
    return dataclasses.replace(
        s,
        topology=dataclasses.replace(s.topology, routers=150, area=100.0, radius=15.0,
                                     delay_ms=15.0, rate_bps=1e9, edges=None),
        workload=dataclasses.replace(s.workload, catalog_size=1_000_000,
                                     consumer_routers=50, producer_routers=10),
        cache=dataclasses.replace(s.cache, capacity=1000),
    )


def _parse_axis(text: str) -> tuple:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=v1,v2,...: {text!r}")
    key, values = text.split("=", 1)
    return key.strip(), [v.strip() for v in values.split(",") if v.strip()]


def expand(s: sc.Scenario, axes: list, seeds=None) -> list:
    """Scenario variants for the cartesian product of sweep axes, then seeds.

    Returns ``(scenario, plane)`` pairs; planes are expanded last.
    """
    merged = dict(s.sweep)
    for key, values in axes:
        merged[key] = values
    plane_axis = merged.pop("plane", None)
    keys = list(merged)
    variants = []
    for combo in itertools.product(*(merged[k] for k in keys)):
        v = s
        for k, value in zip(keys, combo):
            v = sc.override(v, k, value)
        for seed in (seeds or [v.seed]):
            variants.append(dataclasses.replace(v, seed=int(seed)))
    planes = plane_axis or s.plane
    return [(v, p) for v in variants for p in planes]


def _execute(job):
    scenario, plane = job
    metrics = Run(scenario, plane).execute().metrics
    return metrics.summary_row(), metrics.series_rows()


def run_jobs(jobs: list, out_dir: str, n_workers: int = 1) -> list:
    os.makedirs(out_dir, exist_ok=True)
    if n_workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(n_workers) as pool:
            results = list(pool.map(_execute, jobs))
    else:
        results = [_execute(j) for j in jobs]
    summary = [r[0] for r in results]
    series = [row for r in results for row in r[1]]
    write_csv(os.path.join(out_dir, "summary.csv"), summary)
    write_csv(os.path.join(out_dir, "table_sizes.csv"), series)
    return summary


def _load(args) -> sc.Scenario:
    s = sc.load(args.scenario)
    if getattr(args, "seed", None) is not None:
        s = dataclasses.replace(s, seed=args.seed, defaulted=[d for d in s.defaulted if d != "seed"])
    if getattr(args, "full_scale", False):
        s = full_scale(s)
    if getattr(args, "plane", None):
        s = dataclasses.replace(s, plane=[args.plane])
    return s


def _header(s: sc.Scenario, out_dir: str) -> None:
    seed_note = " (default)" if "seed" in s.defaulted else ""
    print(f"# scenario: {s.name}")
    print(f"# seed: {s.seed}{seed_note}")
    print(f"# planes: {','.join(s.plane)}")
    print(f"# output: {out_dir}")


def _print_rows(rows: list) -> None:
    cols = ["plane", "rate", "alpha", "caching", "cache_objects", "locality", "seed",
            "aggregation_pct", "pit_mean", "art_mean", "light_mean", "delay_mean_ms", "delivered"]
    print(",".join(cols))
    for r in rows:
        print(",".join(str(r.get(c, "")) for c in cols))


def cmd_run(args) -> int:
    s = _load(args)
    out = args.out or os.environ.get(OUT_ENV) or "results"
    _header(s, out)
    seeds = [int(x) for x in args.seeds.split(",")] if getattr(args, "seeds", None) else None
    jobs = expand(s, args.sweep or [], seeds)
    rows = run_jobs(jobs, out, args.jobs)
    _print_rows(rows)
    return 0


def cmd_validate(args) -> int:
    s = _load(args)
    jobs = expand(s, [])
    print(f"{args.scenario}: ok ({len(jobs)} run(s), planes={','.join(s.plane)}, seed={s.seed})")
    return 0


def cmd_trace_dump(args) -> int:
    s = _load(args)
    plane = args.plane or s.plane[0]
    stream = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        Run(s, plane, trace=stream).execute()
    finally:
        if args.out:
            stream.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccngram", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, help="scenario file (YAML)")
        p.add_argument("--seed", type=int, help="root seed (overrides the file)")
        p.add_argument("--plane", choices=sc.PLANES, help="run a single plane")
        p.add_argument("--full-scale", action="store_true",
                       help="150 routers, 10^6 objects, 1000-object caches")

    for name, help_ in (("run", "run a scenario (optionally swept)"),
                        ("sweep", "run the cartesian product of sweep axes")):
        p = sub.add_parser(name, help=help_)
        common(p)
        flag = "--sweep" if name == "run" else "--axis"
        p.add_argument(flag, dest="sweep", action="append", type=_parse_axis, metavar="KEY=V1,V2",
                       help="sweep axis; repeatable (keys: rate, alpha, cache, caching, locality, plane, ...)")
        p.add_argument("--seeds", help="comma-separated seeds to replicate over")
        p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./results)")
        p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
        p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="parse and check a scenario file")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("trace-dump", help="run one plane and write the delivery trace as NDJSON")
    common(p)
    p.add_argument("--out", help="trace file (default stdout)")
    p.set_defaults(func=cmd_trace_dump)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except sc.ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
