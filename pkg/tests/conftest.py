import numpy as np
import pytest
from hypothesis import settings

from octo_lattice.lattice import DIM, GridFunction
from octo_lattice.octonion import Octonion

settings.register_profile("lattice", deadline=None, max_examples=40)
settings.load_profile("lattice")

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion."""

    def record(number, label, ok, detail=""):
        _CRITERIA.append((number, label, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, label, ok, detail in sorted(_CRITERIA):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status} {label} {detail}".rstrip())


def origin():
    return np.zeros(DIM, dtype=np.int64)


def delta(point, k, scale=1.0, h=1.0):
    return GridFunction.delta(point, Octonion.basis(k, scale), h)
