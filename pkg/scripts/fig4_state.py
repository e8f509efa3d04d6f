"""Mean forwarding-state size per router: NDN PIT versus CCN-GRAM ART."""
from _common import mean_by, parse_args, sweep

args = parse_args(__doc__, "fig4.scn")
rows = sweep(args, "fig4")
pit = mean_by([r for r in rows if r["plane"] == "ndn"], ("rate",), "pit_mean")
art = mean_by([r for r in rows if r["plane"] == "gram"], ("rate",), "art_mean")
print("rate   pit_mean   art_mean   pit/art")
for (rate,), p in sorted(pit.items(), key=lambda kv: float(kv[0][0])):
    a = art.get((rate,))
    ratio = f"{p / a:.1f}" if a else "-"
    print(f"{rate:>6} {p:>9.2f} {a if a is not None else float('nan'):>10.2f} {ratio:>8}")
