"""Shared test fixtures and the acceptance-line terminal summary."""

# one "[PASS]/[FAIL] Cn ..." line per acceptance criterion, appended by
# tests/test_acceptance.py and echoed after the run (outside capture)
acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
