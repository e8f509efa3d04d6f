"""Pull-mode multicast on a small tree: per-router upstream Interest counts."""
import sys
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from ccngram import scenario as sc  # noqa: E402
from ccngram.experiment import Run  # noqa: E402
from ccngram.messages import MulticastInterest  # noqa: E402

path = sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "scenarios" / "multicast.scn"
s = sc.load(path)
counts = Counter()


def observe(t, src, dst, msg, tag, local):
    if type(msg) is MulticastInterest and not local:
        counts[src] += 1


run = Run(s, "gram", observers=[observe])
result = run.execute()
print("router  upstream_MI  mart_entries")
for rid in sorted(result.routers):
    print(f"{rid:>6}  {counts[rid]:>11}  {len(result.routers[rid].mcast.mart):>12}")
for rx in result.receivers:
    for rid in rx.ids:
        print(f"{rid}: {len(rx.received[rid])} objects")
