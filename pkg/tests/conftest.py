import re

import numpy as np
import pytest

from ctrlscore import TemporalSystem


def random_stable_switched(rng, n, m, horizon=(0.5, 2.0), quantum=None):
    """Entries in [-1, 1], diagonal shifted so every snapshot is Hurwitz.

    ``quantum`` rounds the durations to multiples of it (uniform sampling).
    """
    mats = []
    for _ in range(m):
        a = rng.uniform(-1, 1, (n, n))
        shift = max(np.linalg.eigvals(a).real.max(), 0.0) + rng.uniform(0.1, 0.5)
        mats.append(a - shift * np.eye(n))
    durations = rng.uniform(*horizon, m)
    if quantum:
        durations = np.maximum(np.round(durations / quantum), 1) * quantum
    return TemporalSystem.from_matrices(mats, durations)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_CRITERION = re.compile(r"test_criterion_(\d+)_")
_outcomes = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    k = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        failed = report.outcome == "failed" or _outcomes.get(k) == "FAIL"
        _outcomes[k] = "FAIL" if failed else ("SKIP" if report.outcome == "skipped" else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_outcomes):
        terminalreporter.write_line(f"criterion {k:>2}: {_outcomes[k]}")
