from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cupcodes.errors import InputError, InvariantError
from cupcodes.gf2 import (
    BitMatrix,
    BitVector,
    format_bmx,
    inverse,
    kernel_basis,
    pack_rows,
    parse_bmx,
    popcount_rows,
    quotient_basis,
    rank,
    solve,
    unpack_rows,
)

from conftest import bit_matrices


def _oracle_rank(dense: np.ndarray) -> int:
    """Independent elimination on Python integers (xor basis)."""
    basis: list[int] = []
    for row in dense:
        x = int("".join(str(int(b)) for b in row) or "0", 2)
        for b in basis:
            x = min(x, x ^ b)
        if x:
            basis.append(x)
    return len(basis)


def test_rank_examples():
    assert rank(BitMatrix.from_dense([[1, 1], [1, 1]])) == 1
    assert rank(BitMatrix.identity(3)) == 3


def test_rank_random_matches_oracle():
    rng = np.random.default_rng(7)
    A = (rng.random((20, 30)) < 0.15).astype(np.uint8)
    assert rank(BitMatrix.from_dense(A)) == _oracle_rank(A) == 20


def test_kernel_examples():
    assert [v.support for v in kernel_basis(BitMatrix.from_dense([[1, 1], [1, 1]]))] == [(0, 1)]
    Hbar = BitMatrix.from_dense([[1, 1, 0], [1, 0, 1], [0, 1, 1]])
    assert [v.support for v in kernel_basis(Hbar)] == [(0, 1, 2)]
    assert kernel_basis(BitMatrix.identity(4)) == []


def test_solve_examples():
    b = BitVector.from_dense([1, 0, 1])
    assert solve(BitMatrix.identity(3), b) == b
    assert solve(BitMatrix.from_dense([[1, 1], [1, 1]]), BitVector.from_dense([1, 0])) is None


def test_solve_constructed_instance():
    rng = np.random.default_rng(3)
    M = BitMatrix.from_dense(rng.integers(0, 2, size=(12, 15)))
    x = BitVector.from_dense(rng.integers(0, 2, size=15))
    b = M @ x
    y = solve(M, b)
    assert y is not None and M @ y == b


def test_solve_length_mismatch():
    with pytest.raises(InputError):
        solve(BitMatrix.identity(3), BitVector.zeros(2))


def test_quotient_examples():
    cycles = [BitVector.from_dense([1, 0]), BitVector.from_dense([0, 1])]
    reps = quotient_basis(cycles, [BitVector.from_dense([1, 1])])
    assert len(reps) == 1
    assert quotient_basis(cycles, cycles) == []
    with pytest.raises(InvariantError):
        quotient_basis([BitVector.from_dense([1, 0])], [BitVector.from_dense([0, 1])])


def test_quotient_torus_edges():
    # one-vertex torus: all boundaries vanish, both edges are independent classes
    edges = [BitVector.from_dense([1, 0]), BitVector.from_dense([0, 1])]
    assert len(quotient_basis(edges, [])) == 2


def test_inverse_roundtrip():
    M = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    assert M @ inverse(M) == BitMatrix.identity(3)
    with pytest.raises(InvariantError):
        inverse(BitMatrix.from_dense([[1, 1], [1, 1]]))


def test_bitvector_arithmetic():
    a = BitVector(5, (0, 2))
    b = BitVector(5, (2, 4))
    assert (a + b).support == (0, 4)
    assert a.dot(b) == 1
    assert a.weight == 2
    with pytest.raises(InputError):
        BitVector(3, (3,))


def test_matrix_entries_and_equality():
    with pytest.raises(InputError):
        BitMatrix(2, 2, [(0, 0), (0, 0)])
    M = BitMatrix.from_dense([[2, 0], [0, 1]])
    assert M == BitMatrix(2, 2, [(1, 1)])
    assert M.nnz == 1
    assert hash(M) == hash(BitMatrix(2, 2, [(1, 1)]))


def test_bmx_roundtrip_with_empty_rows():
    M = BitMatrix.from_dense([[0, 0, 0], [1, 0, 1], [0, 0, 0]])
    text = format_bmx(M)
    assert text == "bmx 3 3\n\n0 2\n\n"
    assert parse_bmx(text) == M


@pytest.mark.parametrize(
    "text",
    ["", "bmx 2\n", "bmx 1 2\n0 5\n", "bmx 1 2\n1 0\n", "bmx 1 2\n0 x\n", "bmx 2 2\n0\n", "bmx 1 1\n0\nextra\n"],
)
def test_bmx_rejects_malformed(text):
    with pytest.raises(InputError):
        parse_bmx(text)


# ---------------------------------------------------------------------------
# properties


@given(bit_matrices())
def test_rank_transpose_invariant(M):
    assert rank(M) == rank(M.T)


@given(bit_matrices())
def test_rank_nullity(M):
    ker = kernel_basis(M)
    assert rank(M) + len(ker) == M.cols
    for v in ker:
        assert (M @ v).is_zero()


@given(bit_matrices(min_rows=1, min_cols=1), st.data())
def test_solve_returns_solution(M, data):
    bits = data.draw(st.lists(st.integers(0, 1), min_size=M.rows, max_size=M.rows))
    b = BitVector.from_dense(bits)
    x = solve(M, b)
    if x is not None:
        assert M @ x == b
    else:
        aug = np.hstack([M.to_dense(), np.asarray(bits, dtype=np.uint8)[:, None]])
        assert _oracle_rank(aug) == _oracle_rank(M.to_dense()) + 1


@given(bit_matrices(max_rows=6, max_cols=70, min_cols=1))
def test_pack_roundtrip_and_popcount(M):
    dense = M.to_dense()
    packed = pack_rows(dense)
    assert np.array_equal(unpack_rows(packed, M.cols), dense)
    assert np.array_equal(popcount_rows(packed), dense.sum(axis=1))


@given(bit_matrices(max_rows=6, max_cols=6, min_rows=1, min_cols=1), bit_matrices(max_rows=6, max_cols=6, min_rows=1, min_cols=1))
def test_matmul_matches_integer_product(A, B):
    if A.cols != B.rows:
        B = BitMatrix.from_dense(np.resize(B.to_dense(), (A.cols, B.cols)))
    expect = (A.to_dense().astype(int) @ B.to_dense().astype(int)) % 2
    assert np.array_equal((A @ B).to_dense(), expect)


@given(st.lists(st.lists(st.integers(0, 1), min_size=6, max_size=6), min_size=1, max_size=6), st.data())
def test_quotient_representatives_inequivalent(cyc_rows, data):
    cycles = [BitVector.from_dense(r) for r in cyc_rows]
    pick = data.draw(st.lists(st.sampled_from(range(len(cycles))), max_size=3))
    boundaries = [cycles[i] for i in pick]
    reps = quotient_basis(cycles, boundaries)
    n = 6
    B = np.array([b.to_dense() for b in boundaries]).reshape(-1, n)
    # no nonzero combination of representatives lies in the boundary span
    for mask in range(1, 1 << len(reps)):
        v = BitVector.zeros(n)
        for i, r in enumerate(reps):
            if mask >> i & 1:
                v = v + r
        assert solve(BitMatrix.from_dense(B.T) if len(B) else BitMatrix.zeros(n, 0), v) is None or (
            len(B) == 0 and v.is_zero()
        )
