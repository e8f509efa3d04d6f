"""Table-size sampling, aggregation and delay metrics, CSV output."""
from __future__ import annotations

import csv
import math
import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

TABLE_KINDS = ("pit", "art", "light", "mart")


class TableSampler:
    """Per-router running sums of table sizes plus the network-wide series."""

    def __init__(self, router_ids):
        self.router_ids = list(router_ids)
        self.sums = {r: Counter() for r in self.router_ids}
        self.samples = 0
        self.series: list = []

    def sample(self, t_ms: float, routers: dict) -> None:
        per_kind = {k: [] for k in TABLE_KINDS}
        for r in self.router_ids:
            sizes = routers[r].table_sizes()
            acc = self.sums[r]
            for k in TABLE_KINDS:
                v = sizes.get(k, 0)
                acc[k] += v
                per_kind[k].append(v)
        self.samples += 1
        row = {"t_ms": t_ms}
        for k, values in per_kind.items():
            row[f"{k}_mean"] = statistics.fmean(values)
            row[f"{k}_std"] = statistics.pstdev(values)
        self.series.append(row)

    def per_router_means(self, kind: str) -> list:
        if not self.samples:
            return []
        return [self.sums[r][kind] / self.samples for r in self.router_ids]

    def summary(self, kind: str) -> tuple:
        """Mean over routers of each router's time-averaged size, and the
        standard deviation across routers."""
        means = self.per_router_means(kind)
        if not means:
            return math.nan, math.nan
        return statistics.fmean(means), statistics.pstdev(means)


@dataclass
class DelayStats:
    delays: list = field(default_factory=list)
    failures: Counter = field(default_factory=Counter)
    retransmissions: int = 0
    issued: int = 0
    unfinished: int = 0

    @property
    def mean(self) -> float:
        return statistics.fmean(self.delays) if self.delays else math.nan

    @property
    def std(self) -> float:
        return statistics.pstdev(self.delays) if self.delays else math.nan


def measure_aggregation(received: int, aggregated: int) -> Optional[float]:
    """Percentage of Interest receptions at routers that were aggregated.

    None when no Interest was received.
    """
    if received <= 0:
        return None
    return 100.0 * aggregated / received


@dataclass
class MetricsBundle:
    plane: str
    keys: dict
    interests_received: int
    interests_aggregated: int
    aggregation_pct: Optional[float]
    table_means: dict
    table_stds: dict
    delay: DelayStats
    counters: Counter
    events: int
    series: list = field(default_factory=list)

    SUMMARY_COUNTERS = (
        "aid_collisions", "aid_exhausted", "lfr_rejections", "cache_hits", "local_hits",
        "dropped_data_no_art", "dropped_reply_no_art", "dropped_bad_aid", "dropped_malformed",
        "dropped_unsolicited", "dropped_nack", "duplicate_nonce", "pit_expired",
    )

    def summary_row(self) -> dict:
        row = dict(self.keys)
        row["plane"] = self.plane
        row["interests_received"] = self.interests_received
        row["interests_aggregated"] = self.interests_aggregated
        row["aggregation_pct"] = "" if self.aggregation_pct is None else _fmt(self.aggregation_pct)
        for k in TABLE_KINDS:
            row[f"{k}_mean"] = _fmt(self.table_means[k])
            row[f"{k}_std"] = _fmt(self.table_stds[k])
        row["delay_mean_ms"] = _fmt(self.delay.mean)
        row["delay_std_ms"] = _fmt(self.delay.std)
        row["issued"] = self.delay.issued
        row["delivered"] = len(self.delay.delays)
        row["failed"] = sum(self.delay.failures.values())
        row["unfinished"] = self.delay.unfinished
        row["retransmissions"] = self.delay.retransmissions
        for c in self.SUMMARY_COUNTERS:
            row[c] = self.counters.get(c, 0)
        row["events"] = self.events
        return row

    def series_rows(self) -> list:
        out = []
        for s in self.series:
            row = dict(self.keys)
            row["plane"] = self.plane
            row.update({k: _fmt(v) if isinstance(v, float) else v for k, v in s.items()})
            out.append(row)
        return out


def _fmt(x: float) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.6f}"


def write_csv(path, rows: list) -> None:
    if not rows:
        with open(path, "w", newline="") as fh:
            fh.write("")
        return
    columns = list(rows[0])
    for r in rows[1:]:
        for c in r:
            if c not in columns:
                columns.append(c)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow(r)
