import os

RESULTS = []


def record(criterion, passed, detail):
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'} | {detail}"
    RESULTS.append(line)
    print(line)
    return passed


def pytest_configure(config):
    # keep runs sequential inside tests; the acceptance fixture decides parallelism
    os.environ.setdefault("BALANCEDBO_WORKERS", "1")


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
