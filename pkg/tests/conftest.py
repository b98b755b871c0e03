import numpy as np
import pytest
from hypothesis import strategies as st

from singletfields.qcore import StateVector, UnitDirection


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def _to_direction(v):
    v = np.asarray(v, dtype=float)
    return UnitDirection.from_vector(v / np.linalg.norm(v))


directions = (
    st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3)
    .filter(lambda v: np.linalg.norm(v) > 1e-3)
    .map(_to_direction)
)

angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)


def _to_state(v):
    v = np.asarray(v)
    return StateVector(v[: len(v) // 2] + 1j * v[len(v) // 2:], normalize=True)


def states(num_qubits):
    size = 2 * (1 << num_qubits)
    return (
        st.lists(st.floats(-1, 1, allow_nan=False), min_size=size, max_size=size)
        .filter(lambda v: np.linalg.norm(v) > 1e-2)
        .map(_to_state)
    )


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
