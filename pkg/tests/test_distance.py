from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cupcodes.complex import (
    cohomology_basis,
    css_extract,
    direct_sum,
    dual_pair_bases,
    homology_basis,
    is_cycle,
)
from cupcodes.constructors import circle, classical_complex, random_full_rank, repetition_code, tensor_product, toric_complex
from cupcodes.cw import classical_cw_complex
from cupcodes.distance import (
    cosystole,
    format_trend_table,
    min_nontrivial_weight,
    subsystem_distance,
    systole,
    trend_table,
)
from cupcodes.errors import InputError, NoNontrivialClassError, PreconditionError
from cupcodes.gf2 import BitMatrix, BitVector, solve

from conftest import small_complexes


def _brute_systole(X, k) -> int | None:
    """Enumerate all k-chains; keep cycles that are not boundaries."""
    n = X.n(k)
    D, B = X.d(k).to_dense(), X.d(k + 1)
    best = None
    for bits in itertools.product((0, 1), repeat=n):
        v = np.array(bits, dtype=np.uint8)
        if not v.any() or (D.astype(int) @ v % 2).any():
            continue
        if B.cols and solve(B, BitVector.from_dense(v)) is not None:
            continue
        w = int(v.sum())
        best = w if best is None else min(best, w)
    return best


def _component_pairs(X, k, lo, hi):
    """Dual-paired classes whose representatives live in cells [lo, hi)."""
    hom, coh = dual_pair_bases(homology_basis(X, k), cohomology_basis(X, k), X)
    keep = [i for i, v in enumerate(hom.representatives) if v.support and lo <= min(v.support) and max(v.support) < hi]
    return [hom.representatives[i] for i in keep], [coh.representatives[i] for i in keep]


def test_systole_examples():
    r = systole(toric_complex(3), 1)
    assert (r.value, r.exact, r.method) == (3, True, "exhaustive")
    assert r.witness.weight == 3 and is_cycle(toric_complex(3), 1, r.witness)
    D = classical_cw_complex(repetition_code(5, closed=True)).complex
    assert systole(D, 3).value == 5
    assert systole(tensor_product(circle(1), circle(1)), 1).value == 1


def test_cosystole_examples():
    D = classical_cw_complex(repetition_code(5, closed=True)).complex
    assert cosystole(D, 2).value == 5
    r = cosystole(toric_complex(3), 1)
    assert r.value == 3 and r.exact
    with pytest.raises(NoNontrivialClassError):
        cosystole(D, 4)
    with pytest.raises(NoNontrivialClassError):
        systole(classical_complex(BitMatrix.identity(3)), 1)


def test_information_set_is_upper_bound():
    X = toric_complex(4)
    exact = systole(X, 1, exact=True)
    isd = systole(X, 1, budget=50, exact=False, seed=3)
    assert not isd.exact and isd.method == "information-set"
    assert isd.value >= exact.value == 4
    assert isd.witness.weight == isd.value


def test_min_weight_rejects_empty_dual():
    with pytest.raises(NoNontrivialClassError):
        min_nontrivial_weight(np.eye(3, dtype=np.uint8), np.zeros((0, 3), dtype=np.uint8))


def test_threads_do_not_change_result():
    X = toric_complex(4)
    a = systole(X, 1, threads=1)
    b = systole(X, 1, threads=4)
    assert a.value == b.value and a.witness == b.witness


def test_subsystem_disjoint_union():
    big, small = toric_complex(4), toric_complex(1)
    U = direct_sum(big, small)
    code = css_extract(U, 1)
    z, x = _component_pairs(U, 1, 0, big.n(1))
    assert len(z) == 2
    sub = subsystem_distance(code, z, x)
    assert sub.value == 4 and sub.exact
    assert sub.parts["z"].value == sub.parts["x"].value == 4
    assert min(systole(U, 1).value, cosystole(U, 1).value) == 1


def test_subsystem_all_classes_is_full_distance():
    X = toric_complex(2)
    code = css_extract(X, 1)
    hom, coh = dual_pair_bases(homology_basis(X, 1), cohomology_basis(X, 1), X)
    assert subsystem_distance(code, hom, coh).value == 2


def test_subsystem_errors():
    X = toric_complex(2)
    code = css_extract(X, 1)
    hom, coh = dual_pair_bases(homology_basis(X, 1), cohomology_basis(X, 1), X)
    with pytest.raises(NoNontrivialClassError):
        subsystem_distance(code, [], [])
    with pytest.raises(PreconditionError):
        subsystem_distance(code, [hom.representatives[0]], [coh.representatives[1]])
    with pytest.raises(PreconditionError):
        subsystem_distance(code, [BitVector(X.n(1), (0,))], [coh.representatives[0]])
    with pytest.raises(InputError):
        subsystem_distance(code, [BitVector(3, (0,))], [coh.representatives[0]])


def test_result_lines():
    X = toric_complex(2)
    pairs = dual_pair_bases(homology_basis(X, 1), cohomology_basis(X, 1), X)
    r = subsystem_distance(css_extract(X, 1), *pairs)
    text = r.lines()
    assert text[0] == "distance=2" and any(l.startswith("z_distance=") for l in text)


def test_trend_tables():
    toric = trend_table("toric", [2, 3, 4])
    assert [(r.K, r.d_Z, r.d_X) for r in toric] == [(2, 2, 2), (2, 3, 3), (2, 4, 4)]
    rep = trend_table("classical-double", range(3, 8))
    assert [r.d_Z for r in rep] == list(range(3, 8))
    assert all(r.d_Z_exact and r.d_X_exact for r in rep)
    text = format_trend_table(toric)
    assert text.splitlines()[0].startswith("size N K") and len(text.splitlines()) == 4
    with pytest.raises(InputError):
        trend_table("nope", [1])


def test_trend_triple_toy_matches_kunneth():
    from cupcodes.constructors import kunneth_basis

    rows = trend_table("triple-toy", [2], budget=20)
    D = classical_cw_complex(repetition_code(2, closed=True)).complex
    assert rows[0].K == kunneth_basis([D, D, D], 8).betti == 33


def test_trend_custom_family():
    rows = trend_table(lambda n: (circle(n), 0), [2, 3])
    # one vertex is a nontrivial 0-cycle; the only nontrivial 0-cocycle is all-ones
    assert [(r.N, r.K, r.d_Z, r.d_X) for r in rows] == [(2, 1, 1, 2), (3, 1, 1, 3)]


# ---------------------------------------------------------------------------
# properties


@given(small_complexes(), st.data())
def test_exhaustive_matches_brute_force(X, data):
    grades = [k for k in range(X.top_grade + 1) if homology_basis(X, k).betti and X.n(k) <= 12]
    if not grades:
        return
    k = data.draw(st.sampled_from(grades))
    r = systole(X, k)
    assert r.exact and r.value == _brute_systole(X, k)
    assert is_cycle(X, k, r.witness) and r.witness.weight == r.value


@given(st.integers(0, 10_000))
def test_isd_never_below_exact(seed):
    H = random_full_rank(4, 9, seed)
    X = classical_complex(H)
    exact = systole(X, 1)
    isd = systole(X, 1, budget=5, exact=False, seed=seed)
    assert isd.value >= exact.value


@given(st.integers(2, 4))
def test_subsystem_all_equals_min_sys_cosys(L):
    X = toric_complex(L)
    code = css_extract(X, 1)
    hom, coh = dual_pair_bases(homology_basis(X, 1), cohomology_basis(X, 1), X)
    sub = subsystem_distance(code, hom, coh)
    assert sub.value == min(systole(X, 1).value, cosystole(X, 1).value) == L
