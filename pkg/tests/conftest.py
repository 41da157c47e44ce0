from hypothesis import settings

# keep the suite reproducible: every run draws the same examples
settings.register_profile("reproducible", derandomize=True)
settings.load_profile("reproducible")

acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
