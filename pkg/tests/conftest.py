"""Shared test plumbing.

Puts this directory on sys.path so the independent oracle module imports
plainly, and collects acceptance-criterion verdicts so the terminal
summary ends with one pass/fail line per criterion.
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_criterion_lines = []


@pytest.fixture(scope="session")
def criterion():
    """Callable recording (label, ok, detail) for the final summary."""
    def record(label: str, ok: bool, detail: str = ""):
        _criterion_lines.append((label, bool(ok), detail))
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _criterion_lines:
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] {label}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
