import dataclasses
from pathlib import Path

import pytest

from ccngram import scenario as sc
from ccngram.experiment import Run

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"


@pytest.fixture
def scenario_dir():
    return SCENARIOS


class _TrackedPit(dict):
    """PIT dict that records how long each entry lived."""

    def __init__(self, router, log):
        super().__init__()
        self.router = router
        self.born = {}
        self.log = log

    def __setitem__(self, key, value):
        if key not in self:
            self.born[key] = self.router.now
        super().__setitem__(key, value)

    def __delitem__(self, key):
        self.log.append((self.born.pop(key), self.router.now))
        super().__delitem__(key)


@pytest.fixture(scope="session")
def desk_small_ndn():
    s = sc.load(SCENARIOS / "fig4.scn")
    s = dataclasses.replace(s, warmup_s=2, measure_s=6, plane=["ndn"])
    s = sc.override(s, "rate", 100)
    run = Run(s, "ndn")
    log = []
    for r in run.routers.values():
        r.pit = _TrackedPit(r, log)
    result = run.execute()
    lo, hi = run.warmup_ms, run.end_ms
    lifetimes = [d - b for b, d in log if lo <= b and d <= hi]
    return result, lifetimes, (hi - lo) / 1000.0


# One line per acceptance criterion, printed at the end of the session.
ACCEPTANCE_LINES: list = []


def report(label: str, ok: bool, detail: str = "") -> None:
    line = f"{label}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
