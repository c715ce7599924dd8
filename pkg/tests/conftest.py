from __future__ import annotations

import numpy as np
import pytest

from regencodes import cauchy, dk1, miser
from regencodes.gf import PrimeField

REF_PSI = [[5, 4, 1], [2, 5, 4], [3, 2, 5]]
REF_P = [
    [1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0],
    [0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0],
    [0, 0, 0, 0, 1],
    [4, 5, 3, 1, 1],
    [3, 6, 1, 1, 7],
    [3, 7, 8, 3, 4],
]
REF_R = [
    [0, 0, 1, 2, 2],
    [2, 0, 1, 1, 1],
    [0, 0, 0, 10, 0],
    [1, 2, 1, 0, 1],
    [1, 0, 0, 1, 0],
    [0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0],
    [1, 0, 4, 0, 0],
]


@pytest.fixture
def F7():
    return PrimeField(7)


@pytest.fixture
def F11():
    return PrimeField(11)


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


def reference_miser():
    """[6,3,5] over F7 with the printed Psi (x = (4,5,6), y = (1,2,3)) and epsilon = 2."""
    F = PrimeField(7)
    return miser.construct(3, F, cauchy_spec=cauchy.make_spec((4, 5, 6), (1, 2, 3), F), epsilon=2)


def reference_dk1():
    """[8,5,6] over F11 with the printed P and R. Its P has one dependent 5-subset."""
    return dk1.construct_dk1(8, 5, 11, p=REF_P, r=REF_R, require_independent=False)


@pytest.fixture
def ref_code():
    return reference_miser()


# --- acceptance reporting: one PASS/FAIL line per criterion in the summary ---

_acceptance: dict[int, tuple[str, bool]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or (rep.when != "call" and not rep.failed):
        return
    num, title = marker.args
    ok = rep.passed and _acceptance.get(num, (title, True))[1]
    _acceptance[num] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_acceptance):
        title, ok = _acceptance[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {title}")
