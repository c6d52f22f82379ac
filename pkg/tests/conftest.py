"""Shared pytest hooks: the acceptance suite registers one line per
criterion here, printed in a dedicated terminal section at the end of
the run regardless of capture mode."""

ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
