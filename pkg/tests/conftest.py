import pytest

from tracechain.setfam import KFamily, mask_of


def fam(n, k, *sets):
    """Family from compact digit strings, e.g. fam(4, 2, "12", "34")."""
    return KFamily.from_sets(n, k, [[int(c) for c in s] for s in sets])


def m(s):
    return mask_of(int(c) for c in s)


@pytest.fixture
def F():
    return fam


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
