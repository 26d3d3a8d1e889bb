from __future__ import annotations

import re

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cupcodes.constructors import circle, classical_complex, random_full_rank, symmetrize, tensor_product
from cupcodes.cw import classical_cw_complex
from cupcodes.gf2 import BitMatrix

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def bit_matrices(draw, max_rows: int = 8, max_cols: int = 10, min_rows: int = 0, min_cols: int = 0):
    m = draw(st.integers(min_rows, max_rows))
    n = draw(st.integers(min_cols, max_cols))
    bits = draw(st.lists(st.integers(0, 1), min_size=m * n, max_size=m * n))
    return BitMatrix.from_dense(np.asarray(bits, dtype=np.uint8).reshape(m, n))


@st.composite
def small_complexes(draw):
    """Random chain complexes from the package's own constructors."""
    kind = draw(st.sampled_from(["classical", "circle", "product", "double"]))
    seed = draw(st.integers(0, 10_000))
    if kind == "circle":
        return circle(draw(st.integers(1, 5)))
    if kind == "classical":
        m = draw(st.integers(1, 4))
        return classical_complex(random_full_rank(m, m + draw(st.integers(0, 3)), seed))
    if kind == "product":
        a = classical_complex(random_full_rank(2, 3, seed))
        return tensor_product(a, circle(draw(st.integers(1, 3))))
    m = draw(st.integers(1, 3))
    H = random_full_rank(m, m + draw(st.integers(1, 3)), seed)
    return classical_cw_complex(symmetrize(H)).complex


# ---------------------------------------------------------------------------
# acceptance summary: one PASS/FAIL line per criterion

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    num, name = int(m.group(1)), m.group(2)
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[num] = ("PASS" if report.outcome == "passed" else "FAIL", name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        verdict, name = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d}: {verdict}  {name}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
