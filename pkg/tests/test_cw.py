from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cupcodes.complex import ChainComplex, betti_numbers, css_extract, validate
from cupcodes.constructors import random_full_rank, random_regular_code, repetition_code, symmetrize, toric_complex
from cupcodes.cw import classical_cw_complex, poincare_report, quantum_cw_complex
from cupcodes.distance import cosystole, systole
from cupcodes.errors import InputError, PreconditionError
from cupcodes.gf2 import BitMatrix, rank


def _min_codeword(H: BitMatrix) -> int:
    """Brute-force minimum nonzero weight of ker H."""
    D = H.to_dense().astype(int)
    best = None
    for bits in itertools.product((0, 1), repeat=H.cols):
        x = np.array(bits)
        if x.any() and not (D @ x % 2).any():
            w = int(x.sum())
            best = w if best is None else min(best, w)
    return best


def test_toy_double_betti():
    D = classical_cw_complex(BitMatrix.from_dense([[1, 1], [1, 1]]))
    assert betti_numbers(D.complex) == (1, 1, 1, 1, 0, 1, 1, 1, 1)
    assert D.r == 8 and D.kind == "classical"
    assert validate(D.complex).passed


def test_closed_repetition_cells():
    D = classical_cw_complex(repetition_code(5, closed=True))
    assert D.complex.cells == (5, 5, 5, 5, 0, 5, 5, 5, 5)
    b = betti_numbers(D.complex)
    assert b[3] == 1 and b[2] == 1
    assert D.complex.d(3) == repetition_code(5, closed=True)
    assert D.complex.d(2).is_zero()
    assert D.complex.d(6) == D.complex.d(3).T


def test_roles_and_labels():
    D = classical_cw_complex(repetition_code(3))
    assert D.roles[0] == ("check-0cell",) * 2
    assert D.roles[3] == ("bit-3cell",) * 3
    assert D.roles[8][0] == "mirror-check-0cell"
    # bit 1 touches checks 0 and 1, giving one path edge
    assert D.complex.grade_labels(1) == ("b1:p0-p1",)


def test_two_components():
    H = BitMatrix.from_dense([[1, 1, 0, 0], [0, 0, 1, 1]])
    assert betti_numbers(classical_cw_complex(H).complex)[0] == 2


def test_classical_errors():
    with pytest.raises(InputError):
        classical_cw_complex(repetition_code(3), r=6)
    with pytest.raises(PreconditionError):
        classical_cw_complex(BitMatrix.zeros(2, 3))


def test_larger_r_shifts_mirror():
    D = classical_cw_complex(repetition_code(3, closed=True), r=10)
    b = betti_numbers(D.complex)
    assert len(b) == 11 and b[3] == b[7] == 1


def test_quantum_toric():
    code = css_extract(toric_complex(2), 1)
    Q = quantum_cw_complex(code.H_X, code.H_Z)
    b = betti_numbers(Q.complex)
    assert b[4] == b[7] == 2
    assert Q.complex.cells == (0, 0, 0, 4, 8, 4, 4, 8, 4, 0, 0, 0)
    assert Q.complex.d(7) == code.H_Z and Q.complex.d(8) == code.H_X.T


def test_quantum_free_qubits_and_422():
    Q = quantum_cw_complex(BitMatrix.zeros(0, 5), BitMatrix.zeros(0, 5))
    assert betti_numbers(Q.complex)[4] == 5
    ones = BitMatrix.from_dense([[1, 1, 1, 1]])
    assert betti_numbers(quantum_cw_complex(ones, ones).complex)[4] == 2


def test_quantum_errors():
    with pytest.raises(InputError):
        quantum_cw_complex(BitMatrix.zeros(0, 2), BitMatrix.zeros(0, 2), r=10)
    with pytest.raises(InputError):
        quantum_cw_complex(BitMatrix.zeros(0, 2), BitMatrix.zeros(0, 3))
    with pytest.raises(PreconditionError):
        quantum_cw_complex(BitMatrix.from_dense([[1, 0]]), BitMatrix.from_dense([[1, 0]]))


def test_poincare_symmetric_examples():
    toy = poincare_report(classical_cw_complex(BitMatrix.from_dense([[1, 1], [1, 1]])))
    assert toy.symmetric and toy.flagged == ()
    assert all(row.pairing in ("invertible", "empty") for row in toy.rows)
    code = css_extract(toric_complex(2), 1)
    q = poincare_report(quantum_cw_complex(code.H_X, code.H_Z))
    assert q.symmetric
    assert q.lines()[-1] == "poincare_symmetric=1"


def test_poincare_flags_corruption():
    C = classical_cw_complex(repetition_code(3, closed=True)).complex
    bd = {k: C.d(k) for k in range(1, C.top_grade + 1)}
    bd[6] = BitMatrix.zeros(*bd[6].shape)
    bad = ChainComplex(C.cells, bd)
    rep = poincare_report(bad)
    assert not rep.symmetric
    assert 2 in rep.flagged or 3 in rep.flagged


def test_regular_cell_count_linear():
    n = 24
    H = random_regular_code(n, 3, 4, seed=5)
    D = classical_cw_complex(H).complex
    # checks appear at grades 0 and 2 on both sides: 4m + 2n + 2 n (dv - 1)
    assert sum(D.cells) == 4 * 18 + 2 * n + 2 * n * 2
    assert sum(D.cells) <= 9 * n


# ---------------------------------------------------------------------------
# properties


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 10_000))
def test_double_betti_matches_kernels(m, extra, seed):
    H = random_full_rank(m, m + extra, seed)
    Hbar = symmetrize(H)
    D = classical_cw_complex(Hbar)
    b = betti_numbers(D.complex)
    assert b[3] == Hbar.cols - rank(Hbar)
    assert b[2] == Hbar.rows - rank(Hbar)
    assert b[0] == D.tanner.components()
    assert all(b[k] == b[D.r - k] for k in range(D.r + 1))


@given(st.integers(2, 4), st.integers(1, 4), st.integers(0, 10_000))
def test_systole_equals_min_codeword(m, extra, seed):
    H = random_full_rank(m, m + extra, seed)
    Hbar = symmetrize(H)
    D = classical_cw_complex(Hbar).complex
    sys3 = systole(D, 3, exact=True)
    assert sys3.exact and sys3.value == _min_codeword(Hbar)
    cos2 = cosystole(D, 2, exact=True)
    assert cos2.value == _min_codeword(Hbar.T)
