"""Mean end-to-end delay of both planes under on-path and edge caching."""
from _common import mean_by, parse_args, sweep

args = parse_args(__doc__, "fig5.scn")
rows = sweep(args, "fig5")
delays = mean_by(rows, ("caching", "rate", "plane"), "delay_mean_ms")
print("caching   rate   gram_ms   ndn_ms   gap")
for caching, rate in sorted({(c, r) for c, r, _ in delays}, key=lambda k: (k[0], float(k[1]))):
    g, n = delays.get((caching, rate, "gram")), delays.get((caching, rate, "ndn"))
    gap = f"{100 * (g - n) / n:+.2f}%" if g and n else "-"
    print(f"{caching:<8} {rate:>6} {g or float('nan'):>9.2f} {n or float('nan'):>8.2f} {gap:>7}")
