import os
import sys

sys.path.insert(0, os.path.dirname(__file__))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import CRITERIA, RESULTS, summary_line

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in CRITERIA:
        if n in RESULTS:
            terminalreporter.write_line(summary_line(n))
