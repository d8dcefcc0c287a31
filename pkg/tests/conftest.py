import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def report(request):
    """report(n, ok, detail): one PASS/FAIL line per acceptance criterion."""
    lines = request.config.stash[_LINES]

    def _report(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append((n, line))
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
