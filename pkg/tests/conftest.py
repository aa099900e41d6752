from __future__ import annotations

from dataclasses import dataclass, field

import pytest


@dataclass
class Criterion:
    number: int
    title: str
    passed: bool | None = None
    notes: list[str] = field(default_factory=list)

    def check(self, ok: bool, note: str) -> bool:
        self.notes.append(("ok   " if ok else "FAIL ") + note)
        self.passed = ok if self.passed is None else (self.passed and ok)
        return ok

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.number}: {self.title}"


_RESULTS: dict[int, Criterion] = {}


@pytest.fixture
def criterion(request):
    """Collects per-check verdicts for one acceptance criterion.

    A criterion whose test errors before finishing is reported as FAIL.
    """
    marker = request.node.get_closest_marker("criterion")
    number, title = marker.args
    crit = Criterion(number, title)
    _RESULTS[number] = crit
    yield crit
    if crit.passed is None:
        crit.passed = False
        crit.notes.append("FAIL test ended before any check was recorded")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    # An exception inside a criterion test must show up as FAIL in the summary.
    marker = item.get_closest_marker("criterion")
    if marker and call.when == "call" and call.excinfo is not None:
        crit = _RESULTS.get(marker.args[0])
        if crit is not None:
            crit.passed = False


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_RESULTS):
        crit = _RESULTS[number]
        tr.write_line(crit.line())
        for note in crit.notes:
            tr.write_line(f"    {note}")
