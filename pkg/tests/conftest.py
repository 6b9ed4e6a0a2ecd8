import math
from functools import reduce

import numpy as np
import pytest

from probeqec import HybridState

S2 = 1 / math.sqrt(2)
KET = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([S2, S2], dtype=complex),
    "-": np.array([S2, -S2], dtype=complex),
}
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * S2
I2 = np.eye(2, dtype=complex)


def kron(*vs):
    return reduce(np.kron, vs)


def op_on(op, qubit, n):
    """Dense single-qubit operator on ``qubit`` of ``n`` (qubit 0 leftmost)."""
    return kron(*[op if i == qubit else I2 for i in range(n)])


def dense_fidelity(a, b):
    return abs(np.vdot(a, b)) ** 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_vector(rng, n):
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return v / np.linalg.norm(v)


def random_state(rng, n):
    return HybridState.from_vector(random_vector(rng, n))


def three_sigma(p, n):
    return 3 * math.sqrt(p * (1 - p) / n)


# -- acceptance reporting ------------------------------------------------------

_CRITERIA = {}


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "ran": False})
    if call.when == "call":
        entry["ran"] = True
    if call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception):
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        status = "PASS" if e["ok"] and e["ran"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {e['title']}")
