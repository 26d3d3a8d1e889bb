"""Systoles, cosystoles and CSS/subsystem distances.

Every search runs over a linear space of candidate vectors (cycles or
cocycles) with a *tag* map to a small dual space: a candidate is nontrivial when
its tag is nonzero. Spaces of dimension up to ``EXHAUSTIVE_LIMIT`` are
enumerated completely; larger ones get a randomized information-set upper
bound flagged as inexact.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .complex import ChainComplex, CSSCode, HomologyBasis, cohomology_basis, homology_basis
from .errors import InputError, NoNontrivialClassError, PreconditionError
from .gf2 import BitVector, kernel_matrix, pack_rows, popcount_rows, rref, unpack_rows

__all__ = [
    "EXHAUSTIVE_LIMIT",
    "DistanceResult",
    "TrendRow",
    "min_nontrivial_weight",
    "systole",
    "cosystole",
    "subsystem_distance",
    "trend_table",
    "format_trend_table",
]

EXHAUSTIVE_LIMIT = 22
_LOW_BITS = 16


@dataclass(frozen=True)
class DistanceResult:
    value: int
    exact: bool
    witness: BitVector
    method: str  # "exhaustive" or "information-set"
    parts: dict = field(default_factory=dict, compare=False)

    def lines(self, prefix: str = "") -> list[str]:
        out = [
            f"{prefix}distance={self.value}",
            f"{prefix}exact={int(self.exact)}",
            f"{prefix}method={self.method}",
            f"{prefix}witness=" + ",".join(map(str, self.witness.support)),
        ]
        for name, part in sorted(self.parts.items()):
            out += part.lines(prefix=f"{prefix}{name}_")
        return out


# ---------------------------------------------------------------------------
# search engines


def _tags(gens: np.ndarray, dual: np.ndarray) -> np.ndarray:
    """Integer bitmask of pairings of each generator with the dual rows."""
    P = (gens.astype(np.int64) @ dual.astype(np.int64).T) & 1
    return (P << np.arange(P.shape[1], dtype=np.int64)).sum(axis=1) if P.shape[1] else np.zeros(len(gens), np.int64)


def _exhaustive(gens: np.ndarray, dual: np.ndarray, threads: int = 1) -> tuple[int, np.ndarray]:
    m, n = gens.shape
    tags = _tags(gens, dual)
    packed = pack_rows(gens)
    low = min(m, _LOW_BITS)
    table = np.zeros((1, packed.shape[1]), dtype=np.uint64)
    ttab = np.zeros(1, dtype=np.int64)
    for i in range(low):
        table = np.concatenate([table, table ^ packed[i]])
        ttab = np.concatenate([ttab, ttab ^ tags[i]])
    high = m - low

    def chunk(hs: range):
        best = None
        for h in hs:
            hv = np.zeros(packed.shape[1], dtype=np.uint64)
            ht = 0
            for j in range(high):
                if h >> j & 1:
                    hv ^= packed[low + j]
                    ht ^= int(tags[low + j])
            w = popcount_rows(table ^ hv)
            w = np.where((ttab ^ ht) != 0, w, np.iinfo(np.int64).max)
            i = int(np.argmin(w))
            if best is None or w[i] < best[0]:
                best = (int(w[i]), h, i)
        return best

    total = 1 << high
    if threads > 1 and total > 1:
        step = -(-total // threads)
        ranges = [range(s, min(total, s + step)) for s in range(0, total, step)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = [r for r in pool.map(chunk, ranges) if r is not None]
        best = min(results, key=lambda t: (t[0], t[1], t[2]))
    else:
        best = chunk(range(total))
    weight, h, i = best
    if weight == np.iinfo(np.int64).max:
        raise NoNontrivialClassError("no nontrivial element in the search space")
    vec = table[i].copy()
    for j in range(high):
        if h >> j & 1:
            vec ^= packed[low + j]
    return weight, unpack_rows(vec[None, :], n)[0]


def _information_set(gens: np.ndarray, dual: np.ndarray, budget: int, rng: np.random.Generator) -> tuple[int, np.ndarray]:
    m, n = gens.shape
    best_w, best_v = None, None
    D = dual.astype(np.int64)
    for _ in range(max(1, budget)):
        perm = rng.permutation(n)
        R, _ = rref(gens[:, perm])
        rows = np.zeros_like(R)
        rows[:, perm] = R
        ok = ((rows.astype(np.int64) @ D.T) & 1).any(axis=1)
        if not ok.any():
            continue
        w = rows.sum(axis=1)
        w = np.where(ok, w, n + 1)
        i = int(np.argmin(w))
        if best_w is None or w[i] < best_w:
            best_w, best_v = int(w[i]), rows[i].copy()
    if best_w is None:
        raise NoNontrivialClassError("no nontrivial element found")
    return best_w, best_v


def min_nontrivial_weight(
    gens: np.ndarray,
    dual: np.ndarray,
    *,
    budget: int = 200,
    exact: bool | None = None,
    seed: int = 0,
    threads: int = 1,
) -> DistanceResult:
    """Minimum weight over ``span(gens)`` of vectors pairing nontrivially with ``dual``.

    ``exact=None`` chooses enumeration when ``rank(gens) <= EXHAUSTIVE_LIMIT``.
    """
    gens = np.asarray(gens, dtype=np.uint8)
    dual = np.asarray(dual, dtype=np.uint8)
    if dual.shape[0] == 0:
        raise NoNontrivialClassError("no classes to distinguish")
    basis, _ = rref(gens)
    if exact is None:
        exact = basis.shape[0] <= EXHAUSTIVE_LIMIT
    if exact:
        w, v = _exhaustive(basis, dual, threads)
        return DistanceResult(w, True, BitVector.from_dense(v), "exhaustive")
    w, v = _information_set(basis, dual, budget, np.random.default_rng(seed))
    return DistanceResult(w, False, BitVector.from_dense(v), "information-set")


# ---------------------------------------------------------------------------
# complexes and codes


def systole(X: ChainComplex, k: int, budget: int = 200, *, exact: bool | None = None, seed: int = 0, threads: int = 1) -> DistanceResult:
    """Minimum weight of a homologically nontrivial ``k``-cycle."""
    coh = cohomology_basis(X, k)
    if coh.betti == 0:
        raise NoNontrivialClassError(f"H_{k} vanishes")
    Z = kernel_matrix(X.d(k).to_dense())
    return min_nontrivial_weight(Z, coh.dense(X.n(k)), budget=budget, exact=exact, seed=seed, threads=threads)


def cosystole(X: ChainComplex, k: int, budget: int = 200, *, exact: bool | None = None, seed: int = 0, threads: int = 1) -> DistanceResult:
    """Minimum weight of a cohomologically nontrivial ``k``-cocycle."""
    hom = homology_basis(X, k)
    if hom.betti == 0:
        raise NoNontrivialClassError(f"H^{k} vanishes")
    Z = kernel_matrix(X.d(k + 1).T.to_dense())
    return min_nontrivial_weight(Z, hom.dense(X.n(k)), budget=budget, exact=exact, seed=seed, threads=threads)


def _class_matrix(classes: HomologyBasis | Sequence[BitVector], n: int) -> np.ndarray:
    reps = classes.representatives if isinstance(classes, HomologyBasis) else tuple(classes)
    if not reps:
        return np.zeros((0, n), dtype=np.uint8)
    if any(v.length != n for v in reps):
        raise InputError("class representative has the wrong length")
    out = np.zeros((len(reps), n), dtype=np.uint8)
    for i, v in enumerate(reps):
        out[i, list(v.support)] = 1
    return out


def subsystem_distance(
    code: CSSCode,
    Z_classes: HomologyBasis | Sequence[BitVector],
    X_classes: HomologyBasis | Sequence[BitVector],
    budget: int = 200,
    *,
    exact: bool | None = None,
    seed: int = 0,
    threads: int = 1,
) -> DistanceResult:
    """Dressed distance of the logical qubits spanned by the chosen dual pairs.

    ``Z_classes`` are cycles (``H_X z = 0``) and ``X_classes`` cocycles
    (``H_Z x = 0``) whose pairing must be the identity. Unselected logical
    qubits act as gauge: a Z-type operator counts only if it pairs nontrivially
    with a selected X class, and symmetrically.
    """
    n = code.n_qubits
    Zc, Xc = _class_matrix(Z_classes, n), _class_matrix(X_classes, n)
    if Zc.shape[0] == 0 or Xc.shape[0] == 0:
        raise NoNontrivialClassError("empty class selection")
    if code.H_X.rows and code.H_X.apply(Zc.T).any():
        raise PreconditionError("a Z class representative violates an X check")
    if code.H_Z.rows and code.H_Z.apply(Xc.T).any():
        raise PreconditionError("an X class representative violates a Z check")
    P = (Zc.astype(np.int64) @ Xc.astype(np.int64).T) & 1
    if P.shape[0] != P.shape[1] or not np.array_equal(P, np.eye(P.shape[0], dtype=np.int64)):
        raise PreconditionError("selected Z and X classes are not dual pairs")
    kw = dict(budget=budget, exact=exact, seed=seed, threads=threads)
    dz = min_nontrivial_weight(kernel_matrix(code.H_X.to_dense()), Xc, **kw)
    dx = min_nontrivial_weight(kernel_matrix(code.H_Z.to_dense()), Zc, **kw)
    best = dz if dz.value <= dx.value else dx
    return DistanceResult(
        best.value,
        dz.exact and dx.exact,
        best.witness,
        best.method if dz.method == dx.method else "mixed",
        {"z": dz, "x": dx},
    )


# ---------------------------------------------------------------------------
# size trends


@dataclass(frozen=True)
class TrendRow:
    size: int
    N: int
    K: int
    d_Z: int
    d_X: int
    d_Z_exact: bool
    d_X_exact: bool


Family = Union[str, Callable[[int], tuple[ChainComplex, int]]]


def _family(name: Family) -> Callable[[int], tuple[ChainComplex, int]]:
    if callable(name):
        return name
    from .constructors import repetition_code, tensor_product, toric_complex
    from .cw import classical_cw_complex

    if name == "toric":
        return lambda L: (toric_complex(L), 1)
    if name == "classical-double":
        return lambda n: (classical_cw_complex(repetition_code(n, closed=True)).complex, 3)
    if name == "triple-toy":

        def triple(n: int):
            D = classical_cw_complex(repetition_code(n, closed=True)).complex
            return tensor_product(tensor_product(D, D), D), 8

        return triple
    raise InputError(f"unknown family {name!r}")


def trend_table(family: Family, sizes: Sequence[int], budget: int = 200, *, seed: int = 0) -> list[TrendRow]:
    """Code parameters over a size sweep; data only, no asymptotic claim."""
    make = _family(family)
    rows = []
    for s in sizes:
        X, q = make(int(s))
        coh = cohomology_basis(X, q)
        if coh.betti == 0:
            rows.append(TrendRow(int(s), X.n(q), 0, 0, 0, True, True))
            continue
        dz = systole(X, q, budget, seed=seed)
        dx = cosystole(X, q, budget, seed=seed)
        rows.append(TrendRow(int(s), X.n(q), coh.betti, dz.value, dx.value, dz.exact, dx.exact))
    return rows


def format_trend_table(rows: Sequence[TrendRow]) -> str:
    out = ["size N K d_Z d_X d_Z_exact d_X_exact"]
    for r in rows:
        out.append(f"{r.size} {r.N} {r.K} {r.d_Z} {r.d_X} {int(r.d_Z_exact)} {int(r.d_X_exact)}")
    return "\n".join(out) + "\n"
