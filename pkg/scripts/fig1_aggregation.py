"""NDN Interest aggregation against cache size for two Zipf exponents."""
from _common import mean_by, parse_args, sweep

args = parse_args(__doc__, "fig1.scn")
rows = sweep(args, "fig1")
print("alpha  cache_objects  aggregation_pct")
for (alpha, cache), v in mean_by(rows, ("alpha", "cache_objects"), "aggregation_pct").items():
    print(f"{alpha:>5}  {cache:>13}  {v:.4f}")
