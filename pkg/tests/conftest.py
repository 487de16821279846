import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

CRITERIA = {}


def record(number, ok, detail):
    """Remember one acceptance line; printed again in the terminal summary."""
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    CRITERIA[number] = line
    print(line, flush=True)
    return ok


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[k])
