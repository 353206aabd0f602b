import numpy as np
import pytest

# filled by test_acceptance; printed once at the end of the run
ACCEPTANCE_RESULTS: dict = {}


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(20240611))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
