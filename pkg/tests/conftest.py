import numpy as np
import pytest
from hypothesis import strategies as st

from qmem.pauli import PauliOperator

# filled by test_acceptance: criterion number -> (passed, detail)
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


@st.composite
def paulis(draw, n=None, max_n=3, hermitian=False):
    if n is None:
        n = draw(st.integers(1, max_n))
    full = (1 << n) - 1
    x = draw(st.integers(0, full))
    z = draw(st.integers(0, full))
    if hermitian:
        return PauliOperator.from_bits(n, x, z)
    return PauliOperator(n, x, z, draw(st.integers(0, 3)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
