import math
from collections import Counter

from ccngram.metrics import DelayStats, MetricsBundle, TableSampler, measure_aggregation, write_csv


class _Stub:
    def __init__(self, sizes):
        self.sizes = sizes

    def table_sizes(self):
        return self.sizes


def test_aggregation_ratio():
    assert measure_aggregation(0, 0) is None
    assert measure_aggregation(200, 3) == 1.5


def test_sampler_time_average_then_router_average():
    s = TableSampler(["a", "b"])
    s.sample(0.0, {"a": _Stub({"pit": 2}), "b": _Stub({"pit": 0})})
    s.sample(1.0, {"a": _Stub({"pit": 4}), "b": _Stub({"pit": 2})})
    mean, std = s.summary("pit")
    assert mean == 2.0 and std == 1.0
    assert s.series[1]["pit_mean"] == 3.0
    assert s.summary("art") == (0.0, 0.0)


def test_empty_sampler_reports_nan():
    assert all(math.isnan(x) for x in TableSampler(["a"]).summary("pit"))


def test_summary_row_and_csv(tmp_path):
    d = DelayStats(delays=[10.0, 20.0], issued=3, unfinished=1)
    b = MetricsBundle("ndn", {"scenario": "t", "rate": 50.0}, 10, 1, 10.0,
                      {k: 1.0 for k in ("pit", "art", "light", "mart")},
                      {k: 0.0 for k in ("pit", "art", "light", "mart")}, d, Counter(), 99)
    row = b.summary_row()
    assert row["aggregation_pct"] == "10.000000" and row["delay_mean_ms"] == "15.000000"
    assert row["delivered"] == 2 and row["events"] == 99
    path = tmp_path / "s.csv"
    write_csv(path, [row, row])
    lines = path.read_text().splitlines()
    assert lines[0].startswith("scenario,rate,plane") and len(lines) == 3
