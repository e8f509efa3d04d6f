"""NDN Interest aggregation under temporal locality, with and without caches."""
from _common import mean_by, parse_args, sweep

args = parse_args(__doc__, "fig2.scn")
rows = sweep(args, "fig2")
print("locality  cache_objects  aggregation_pct")
for (loc, cache), v in mean_by(rows, ("locality", "cache_objects"), "aggregation_pct").items():
    print(f"{loc:>8}  {cache:>13}  {v:.4f}")
