import pytest

from mdrf import kernels

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(params=["python", "cython"])
def backend(request):
    try:
        return kernels.get_backend(request.param)
    except ImportError:
        pytest.skip("compiled kernels not built")
