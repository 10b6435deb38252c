import os
import sys

sys.path.insert(0, os.path.dirname(__file__))


def pytest_terminal_summary(terminalreporter):
    import report
    if report.LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(report.LINES):
            terminalreporter.write_line(line)
