from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cupcodes.complex import betti_numbers, validate
from cupcodes.constructors import (
    balanced_product,
    circle,
    circle_action,
    classical_complex,
    kunneth_basis,
    point,
    product_cell_index,
    random_full_rank,
    random_regular_code,
    repetition_code,
    single_edge,
    symmetrize,
    tanner_graph,
    tensor_product,
    toric_complex,
    z_lift_tensor,
)
from cupcodes.cw import classical_cw_complex
from cupcodes.errors import ConstructionError, InputError, InvariantError, PreconditionError
from cupcodes.gf2 import BitMatrix, kernel_basis, rank


def _convolve(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


def test_repetition_examples():
    assert repetition_code(3).to_dense().tolist() == [[1, 1, 0], [0, 1, 1]]
    closed = repetition_code(3, closed=True)
    assert closed.to_dense().tolist() == [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    assert [v.support for v in kernel_basis(closed)] == [(0, 1, 2)]
    assert repetition_code(2, closed=True).to_dense().tolist() == [[1, 1], [1, 1]]
    with pytest.raises(InputError):
        repetition_code(0)


def test_random_regular_degrees():
    H = random_regular_code(12, 3, 4, seed=1)
    D = H.to_dense()
    assert D.shape == (9, 12)
    assert (D.sum(axis=0) == 3).all() and (D.sum(axis=1) == 4).all()
    assert H == random_regular_code(12, 3, 4, seed=1)


def test_random_regular_small_and_impossible():
    assert rank(random_regular_code(4, 1, 2, seed=0)) <= 2
    with pytest.raises(ConstructionError):
        random_regular_code(5, 3, 4, seed=0)
    with pytest.raises(InputError):
        random_regular_code(0, 1, 1, seed=0)


def test_random_full_rank_is_full_rank():
    H = random_full_rank(5, 9, seed=4)
    assert rank(H) == 5 and H.to_dense().any(axis=0).all()
    with pytest.raises(InputError):
        random_full_rank(4, 3, seed=0)


def test_tanner_graph():
    G = tanner_graph(repetition_code(4))
    assert G.degrees == (1, 2, 2, 1)
    assert G.components() == 1
    two = BitMatrix.from_dense([[1, 1, 0, 0], [0, 0, 1, 1]])
    assert tanner_graph(two).components() == 2
    with pytest.raises(PreconditionError):
        tanner_graph(BitMatrix.from_dense([[1, 0]]))


def test_symmetrize_examples():
    S = symmetrize(repetition_code(3))
    assert S.to_dense().tolist() == [[1, 1, 0], [1, 0, 1], [0, 1, 1]]
    assert symmetrize(BitMatrix.identity(3)) == BitMatrix.identity(3)
    with pytest.raises(PreconditionError):
        symmetrize(BitMatrix.from_dense([[1, 1], [1, 1]]))


def test_tensor_examples():
    T = tensor_product(circle(3), circle(3))
    assert T.cells == (9, 18, 9)
    assert betti_numbers(T) == (1, 2, 1)
    assert validate(T).passed
    X = classical_complex(repetition_code(4))
    XP = tensor_product(X, point())
    assert XP.cells == X.cells and XP.d(1) == X.d(1)


def test_product_cell_index():
    X, Y = circle(2), circle(3)
    P = tensor_product(X, Y)
    # grade 1 stores (edge, vertex) after (vertex, edge)
    assert product_cell_index(X, Y, 0, 1, 1, 2) == 5
    assert product_cell_index(X, Y, 1, 0, 0, 0) == 6
    assert P.grade_labels(1)[6] == "(e0,v0)"
    with pytest.raises(InputError):
        product_cell_index(X, Y, 2, 0, 0, 0)


def test_kunneth_torus_times_circle():
    T, S = toric_complex(2), circle(2)
    P = tensor_product(T, S)
    counts = tuple(kunneth_basis([T, S], k, product=P).betti for k in range(4))
    assert counts == (1, 3, 3, 1) == betti_numbers(P)


def test_kunneth_toy_triple():
    D = classical_cw_complex(repetition_code(2, closed=True)).complex
    P = tensor_product(tensor_product(D, D), D)
    K = kunneth_basis([D, D, D], 8, product=P)
    assert K.betti == betti_numbers(P)[8]
    assert K.labels()[0].count(",") == 2


def test_kunneth_detects_wrong_product():
    S = circle(2)
    with pytest.raises(InvariantError):
        kunneth_basis([S, S], 1, product=tensor_product(S, circle(3)))


def test_lift_single_edge_witness():
    E = classical_complex(BitMatrix.from_dense([[1], [1]]))
    _, rep = z_lift_tensor(E, E)
    assert rep.unsigned_max_abs_entry == 2
    assert rep.exact_zero and rep.reduces_to_tensor
    with pytest.raises(PreconditionError):
        z_lift_tensor(circle(2), toric_complex(2))


def test_lift_random_regular_pair():
    X = classical_complex(random_regular_code(8, 3, 4, seed=3))
    Y = classical_complex(random_regular_code(6, 2, 3, seed=3))
    _, rep = z_lift_tensor(X, Y)
    assert rep.exact_zero and rep.reduces_to_tensor
    assert rep.max_column_abs_sum <= 3 + 2


def test_balanced_product_circles():
    S = circle(4)
    act = circle_action(4)
    B, rep = balanced_product(S, S, 4, (act, act))
    assert B.cells == (4, 8, 4)
    assert betti_numbers(B) == (1, 2, 1)
    assert validate(B).passed and rep.exact_zero


def test_balanced_product_trivial_group_is_tensor():
    S = circle(3)
    ident = {0: np.arange(3), 1: np.arange(3)}
    B, _ = balanced_product(S, S, 1, (ident, ident))
    assert B.same_structure(tensor_product(S, S))


def test_balanced_product_rejects_bad_actions():
    S = circle(4)
    act = circle_action(4)
    broken = {0: act[0], 1: np.array([1, 0, 2, 3])}
    with pytest.raises(PreconditionError):
        balanced_product(S, S, 4, (broken, act))
    with pytest.raises(PreconditionError):
        balanced_product(S, S, 2, (act, act))
    with pytest.raises(InputError):
        balanced_product(S, S, 0, (act, act))
    E = single_edge()
    with pytest.raises(PreconditionError):
        balanced_product(E, E, 2, ({0: np.array([1, 0])}, {0: np.array([1, 0])}))


# ---------------------------------------------------------------------------
# properties


@given(st.integers(1, 5), st.integers(0, 4), st.integers(0, 10_000))
def test_symmetrize_preserves_kernel(m, extra, seed):
    H = random_full_rank(m, m + extra, seed)
    S = symmetrize(H)
    assert S == S.T
    assert rank(S) == rank(H)
    for v in kernel_basis(H):
        assert (S @ v).is_zero()


@given(st.integers(0, 10_000), st.sampled_from(["pair", "triple"]))
def test_kunneth_convolution(seed, shape):
    rng = np.random.default_rng(seed)
    n_factors = 2 if shape == "pair" else 3
    factors = []
    for _ in range(n_factors):
        if rng.random() < 0.5:
            factors.append(circle(int(rng.integers(1, 4))))
        else:
            m = int(rng.integers(1, 3))
            factors.append(classical_complex(random_full_rank(m, m + int(rng.integers(0, 2)), rng)))
    P = factors[0]
    expect = betti_numbers(factors[0])
    for F in factors[1:]:
        P = tensor_product(P, F)
        expect = _convolve(expect, betti_numbers(F))
    assert betti_numbers(P) == expect
    for k in range(P.top_grade + 1):
        assert kunneth_basis(factors, k, product=P).betti == expect[k]


@given(st.integers(0, 10_000))
def test_signed_lift_is_exact(seed):
    rng = np.random.default_rng(seed)
    X = classical_complex(random_full_rank(int(rng.integers(1, 4)), 4, rng))
    Y = classical_complex(random_full_rank(int(rng.integers(1, 4)), 4, rng))
    _, rep = z_lift_tensor(X, Y)
    assert rep.exact_zero and rep.reduces_to_tensor


@given(st.integers(1, 4))
def test_balanced_cell_count(ell):
    L = 2 * ell
    S, R = circle(L), circle(ell)
    act_s = {k: (np.arange(L) + 2) % L for k in (0, 1)}
    B, _ = balanced_product(S, R, ell, (act_s, circle_action(ell)))
    assert B.cells == tuple(c // ell for c in tensor_product(S, R).cells)
    assert validate(B).passed
