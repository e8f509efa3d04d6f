"""Shared driver for the figure scripts: run a scenario sweep through the
CLI machinery and return the summary rows."""
import argparse
import dataclasses
import os
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from ccngram import cli  # noqa: E402
from ccngram import scenario as sc  # noqa: E402


def parse_args(description, scenario):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--scenario", default=str(ROOT / "scenarios" / scenario))
    p.add_argument("--seeds", default="1", help="comma-separated seeds")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--full-scale", action="store_true")
    p.add_argument("--warmup", type=float, help="override warm-up seconds")
    p.add_argument("--measure", type=float, help="override measured seconds")
    return p.parse_args()


def sweep(args, name):
    s = sc.load(args.scenario)
    if args.full_scale:
        s = cli.full_scale(s)
    if args.warmup is not None:
        s = dataclasses.replace(s, warmup_s=args.warmup)
    if args.measure is not None:
        s = dataclasses.replace(s, measure_s=args.measure)
    out = args.out or os.environ.get(cli.OUT_ENV) or str(ROOT / "results" / name)
    seeds = [int(x) for x in args.seeds.split(",")]
    rows = cli.run_jobs(cli.expand(s, [], seeds), out, args.jobs)
    print(f"wrote {out}/summary.csv and {out}/table_sizes.csv")
    return rows


def mean_by(rows, keys, value):
    groups = {}
    for r in rows:
        if r[value] == "":
            continue
        groups.setdefault(tuple(r[k] for k in keys), []).append(float(r[value]))
    return {k: sum(v) / len(v) for k, v in sorted(groups.items())}
