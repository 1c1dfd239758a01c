import pytest

from holobias import _backend

BACKENDS = ["python"]
try:
    _backend.get("cython")
except ImportError:
    pass
else:
    BACKENDS.append("cython")


@pytest.fixture(params=BACKENDS)
def backend(request):
    return _backend.get(request.param)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
