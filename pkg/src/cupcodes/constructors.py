"""Classical codes, small fixture complexes, tensor/balanced products and integer lifts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .complex import ChainComplex, HomologyBasis, cohomology_basis, homology_basis
from .errors import ConstructionError, InputError, InvariantError, PreconditionError
from .gf2 import BitMatrix, dense_to_vectors, rank

__all__ = [
    "TannerGraph",
    "IntMatrix",
    "IntChainComplex",
    "LiftReport",
    "tanner_graph",
    "repetition_code",
    "random_regular_code",
    "random_full_rank",
    "symmetrize",
    "classical_complex",
    "point",
    "circle",
    "single_edge",
    "toric_complex",
    "tensor_product",
    "product_cell_index",
    "kunneth_basis",
    "z_lift_tensor",
    "balanced_product",
    "circle_action",
]

MAX_RETRIES = 10_000


# ---------------------------------------------------------------------------
# classical codes


@dataclass(frozen=True)
class TannerGraph:
    """Bit/check incidence of a parity-check matrix (checks are rows)."""

    n_bits: int
    n_checks: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.adjacency) != self.n_bits:
            raise InputError("one adjacency list per bit required")
        for i, adj in enumerate(self.adjacency):
            if not adj:
                raise PreconditionError(f"bit {i} touches no check")
            if list(adj) != sorted(set(adj)) or adj[0] < 0 or adj[-1] >= self.n_checks:
                raise InputError(f"bad adjacency for bit {i}")

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    def components(self) -> int:
        """Number of connected components of the bipartite graph."""
        parent = list(range(self.n_bits + self.n_checks))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i, adj in enumerate(self.adjacency):
            for j in adj:
                ra, rb = find(i), find(self.n_bits + j)
                if ra != rb:
                    parent[ra] = rb
        return len({find(a) for a in range(len(parent))})


def tanner_graph(H: BitMatrix) -> TannerGraph:
    HT = H.T
    return TannerGraph(H.cols, H.rows, tuple(HT.row_support(i) for i in range(H.cols)))


def repetition_code(n: int, closed: bool = False) -> BitMatrix:
    """Checks ``e_i + e_{i+1}``; the closed version wraps around."""
    if n < 2:
        raise InputError("repetition code needs n >= 2")
    if closed:
        return BitMatrix.from_dense(
            np.eye(n, dtype=np.uint8) ^ np.roll(np.eye(n, dtype=np.uint8), 1, axis=1)
        )
    return BitMatrix(n - 1, n, [(i, i) for i in range(n - 1)] + [(i, i + 1) for i in range(n - 1)])


def random_regular_code(n: int, dv: int, dc: int, seed: int | np.random.Generator) -> BitMatrix:
    """Configuration-model (dv, dc)-regular code with no repeated edges."""
    if n < 1 or dv < 1 or dc < 1:
        raise InputError("n, dv, dc must be positive")
    if (n * dv) % dc:
        raise ConstructionError(f"n*dv = {n * dv} is not divisible by dc = {dc}")
    m = n * dv // dc
    if dv > m or dc > n:
        raise ConstructionError("degree exceeds the opposite side; no simple graph exists")
    rng = np.random.default_rng(seed)
    checks = np.repeat(np.arange(m), dc)
    bits = np.repeat(np.arange(n), dv)
    for _ in range(MAX_RETRIES):
        perm = rng.permutation(checks)
        keys = perm * n + bits
        if np.unique(keys).size == keys.size:
            return BitMatrix(m, n, zip(perm.tolist(), bits.tolist()))
    raise ConstructionError(f"no simple ({dv},{dc}) graph found after {MAX_RETRIES} retries")


def random_full_rank(m: int, n: int, seed: int | np.random.Generator, density: float = 0.5) -> BitMatrix:
    """Random full-row-rank ``m x n`` matrix without zero columns."""
    if m > n:
        raise InputError("full row rank needs m <= n")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_RETRIES):
        A = (rng.random((m, n)) < density).astype(np.uint8)
        empty = np.flatnonzero(~A.any(axis=0))
        A[rng.integers(0, m, size=empty.size), empty] = 1
        if rank(A) == m:
            return BitMatrix.from_dense(A)
    raise ConstructionError("could not sample a full-rank matrix")


def symmetrize(H: BitMatrix) -> BitMatrix:
    """``H^T H``; requires full row rank so the kernel is unchanged."""
    if rank(H) != H.rows:
        raise PreconditionError("symmetrize requires H to have full row rank")
    return H.T @ H


def classical_complex(H: BitMatrix) -> ChainComplex:
    """Two-term complex: bits at grade 1, checks at grade 0, ``d1 = H``."""
    labels = (tuple(f"c{j}" for j in range(H.rows)), tuple(f"b{i}" for i in range(H.cols)))
    return ChainComplex((H.rows, H.cols), {1: H}, labels)


# ---------------------------------------------------------------------------
# small fixtures


def point() -> ChainComplex:
    return ChainComplex((1,), {}, (("pt",),))


def circle(L: int = 1) -> ChainComplex:
    """Cell circle with vertices ``v_i`` and edges ``e_i = [v_i, v_{i+1}]``."""
    if L < 1:
        raise InputError("circle needs at least one cell per grade")
    D = np.zeros((L, L), dtype=np.uint8)
    for i in range(L):
        D[i, i] ^= 1
        D[(i + 1) % L, i] ^= 1
    labels = (tuple(f"v{i}" for i in range(L)), tuple(f"e{i}" for i in range(L)))
    return ChainComplex((L, L), {1: BitMatrix.from_dense(D)}, labels)


def single_edge() -> ChainComplex:
    """An interval: two vertices joined by one edge."""
    return ChainComplex((2, 1), {1: BitMatrix(2, 1, [(0, 0), (1, 0)])}, (("v0", "v1"), ("e0",)))


def circle_action(L: int) -> dict[int, np.ndarray]:
    """Rotation ``v_i -> v_{i+1}``, ``e_i -> e_{i+1}`` on :func:`circle`."""
    shift = (np.arange(L) + 1) % L
    return {0: shift, 1: shift.copy()}


# ---------------------------------------------------------------------------
# tensor products


def _blocks(cx: Sequence[int], cy: Sequence[int], k: int) -> list[tuple[int, int, int]]:
    """(p, q, offset) for the blocks of product grade ``k`` in storage order."""
    out, off = [], 0
    for p in range(len(cx)):
        q = k - p
        if 0 <= q < len(cy):
            out.append((p, q, off))
            off += cx[p] * cy[q]
    return out


def product_cell_index(X: ChainComplex, Y: ChainComplex, p: int, i: int, q: int, j: int) -> int:
    """Index of the product cell ``x_i (grade p) x y_j (grade q)``."""
    for pp, qq, off in _blocks(X.cells, Y.cells, p + q):
        if pp == p:
            return off + i * Y.n(q) + j
    raise InputError(f"no block ({p},{q}) in product")


def tensor_product(X: ChainComplex, Y: ChainComplex) -> ChainComplex:
    """Tensor product with ``d(x y) = dx y + x dy`` over GF(2)."""
    cx, cy = X.cells, Y.cells
    r = X.top_grade + Y.top_grade
    cells = tuple(sum(cx[p] * cy[q] for p, q, _ in _blocks(cx, cy, k)) for k in range(r + 1))
    bd = {}
    for k in range(1, r + 1):
        row_off = {p: off for p, _, off in _blocks(cx, cy, k - 1)}
        rr, cc = [np.zeros(0, np.int64)], [np.zeros(0, np.int64)]
        for p, q, off in _blocks(cx, cy, k):
            parts = []
            if p >= 1 and (p - 1) in row_off:
                parts.append((row_off[p - 1], sp.kron(X.d(p).to_csr(), sp.identity(cy[q], dtype=np.int64))))
            if q >= 1 and p in row_off:
                parts.append((row_off[p], sp.kron(sp.identity(cx[p], dtype=np.int64), Y.d(q).to_csr())))
            for roff, blk in parts:
                blk = sp.coo_matrix(blk)
                blk.eliminate_zeros()
                rr.append(blk.row.astype(np.int64) + roff)
                cc.append(blk.col.astype(np.int64) + off)
        rows_all, cols_all = np.concatenate(rr), np.concatenate(cc)
        M = sp.csr_matrix((np.ones(rows_all.size, np.int64), (rows_all, cols_all)), shape=(cells[k - 1], cells[k]))
        bd[k] = BitMatrix._from_csr(M)
    labels = tuple(
        tuple(
            f"({lx},{ly})"
            for p, q, _ in _blocks(cx, cy, k)
            for lx in X.grade_labels(p)
            for ly in Y.grade_labels(q)
        )
        for k in range(r + 1)
    )
    return ChainComplex(cells, bd, labels)


def toric_complex(L: int) -> ChainComplex:
    """Toric code complex: product of two ``L``-cell circles."""
    return tensor_product(circle(L), circle(L))


def _factor_bases(X: ChainComplex, cohomology: bool) -> list[HomologyBasis]:
    fn = cohomology_basis if cohomology else homology_basis
    return [fn(X, k) for k in range(X.top_grade + 1)]


def _kunneth_all(
    factors: Sequence[ChainComplex], bases: Sequence[Sequence[HomologyBasis]]
) -> tuple[list[int], list[tuple[np.ndarray, list[str]]]]:
    """Künneth representatives at every grade of the iterated product."""
    cells = list(factors[0].cells)
    cur = []
    for k, hb in enumerate(bases[0]):
        cur.append((hb.dense(cells[k]) if hb.betti else np.zeros((0, cells[k]), np.uint8), list(hb.labels())))
    for F, fb in zip(factors[1:], bases[1:]):
        fcells = list(F.cells)
        r = len(cells) - 1 + F.top_grade
        new_cells = [sum(cells[p] * fcells[q] for p, q, _ in _blocks(cells, fcells, k)) for k in range(r + 1)]
        new = []
        for k in range(r + 1):
            rows, labs = [], []
            for p, q, off in _blocks(cells, fcells, k):
                A, la = cur[p]
                hb = fb[q]
                if A.shape[0] == 0 or hb.betti == 0:
                    continue
                B = hb.dense(fcells[q])
                block = np.einsum("ia,jb->ijab", A, B).reshape(A.shape[0] * B.shape[0], -1)
                full = np.zeros((block.shape[0], new_cells[k]), dtype=np.uint8)
                full[:, off : off + block.shape[1]] = block
                rows.append(full)
                labs += [f"({x},{y})" for x in la for y in hb.labels()]
            mat = np.vstack(rows) if rows else np.zeros((0, new_cells[k]), np.uint8)
            new.append((mat, labs))
        cells, cur = new_cells, new
    return cells, cur


def kunneth_basis(
    factors: Sequence[ChainComplex],
    k: int,
    *,
    factor_bases: Sequence[Sequence[HomologyBasis]] | None = None,
    product: ChainComplex | None = None,
    cohomology: bool = False,
) -> HomologyBasis:
    """Product-class representatives built from factor representatives.

    ``factor_bases[f][q]`` is the basis of factor ``f`` at grade ``q``. When
    ``product`` is given (the iterated :func:`tensor_product`), the result is
    checked to be a basis of its (co)homology at grade ``k``.
    """
    if not factors:
        raise InputError("at least one factor required")
    if factor_bases is None:
        factor_bases = [_factor_bases(F, cohomology) for F in factors]
    if len(factor_bases) != len(factors):
        raise InputError("one basis list per factor required")
    cells, per_grade = _kunneth_all(factors, factor_bases)
    if not 0 <= k < len(cells):
        raise InputError(f"grade {k} outside product range")
    reps, labs = per_grade[k]
    if product is not None:
        _check_kunneth(product, k, reps, cohomology)
    return HomologyBasis(k, tuple(dense_to_vectors(reps)) if reps.shape[0] else (), cohomology, tuple(labs))


def _check_kunneth(P: ChainComplex, k: int, reps: np.ndarray, cohomology: bool) -> None:
    if reps.shape[1] != P.n(k):
        raise InvariantError("Künneth representatives do not match product cell count")
    if cohomology:
        closed, exact = P.d(k + 1).T, P.d(k).T
    else:
        closed, exact = P.d(k), P.d(k + 1)
    if reps.shape[0]:
        if closed.apply(reps.T).any():
            raise InvariantError("Künneth representative is not closed")
    B = exact.T.to_dense()
    stacked = np.vstack([B, reps]) if reps.shape[0] else B
    gained = rank(stacked) - rank(B)
    direct = P.n(k) - rank(closed) - rank(exact)
    if gained != reps.shape[0] or direct != reps.shape[0]:
        raise InvariantError(
            f"Künneth count {reps.shape[0]} vs independent {gained} vs direct betti {direct} at grade {k}"
        )


# ---------------------------------------------------------------------------
# integer lifts


@dataclass(frozen=True, eq=False)
class IntMatrix:
    """Dense signed integer matrix."""

    array: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.array, dtype=np.int64)
        if arr.ndim != 2:
            raise InputError("IntMatrix must be 2-dimensional")
        object.__setattr__(self, "array", arr)

    @property
    def rows(self) -> int:
        return self.array.shape[0]

    @property
    def cols(self) -> int:
        return self.array.shape[1]

    def entries(self) -> list[tuple[int, int, int]]:
        r, c = np.nonzero(self.array)
        return [(int(a), int(b), int(self.array[a, b])) for a, b in zip(r, c)]

    def mod2(self) -> BitMatrix:
        return BitMatrix.from_dense(self.array & 1)

    def is_zero(self) -> bool:
        return not self.array.any()

    def max_column_abs_sum(self) -> int:
        return int(np.abs(self.array).sum(axis=0).max()) if self.array.size else 0

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(self.array @ other.array)


@dataclass(frozen=True, eq=False)
class IntChainComplex:
    cells: tuple[int, ...]
    boundary: Mapping[int, IntMatrix]

    @property
    def top_grade(self) -> int:
        return len(self.cells) - 1

    def compositions(self) -> dict[int, IntMatrix]:
        return {k: self.boundary[k] @ self.boundary[k + 1] for k in range(1, self.top_grade)}


@dataclass(frozen=True)
class LiftReport:
    exact_zero: bool
    composition: IntMatrix
    max_column_abs_sum: int
    unsigned_composition: IntMatrix
    unsigned_max_abs_entry: int
    reduces_to_tensor: bool

    def lines(self) -> list[str]:
        return [
            f"signed_exact={int(self.exact_zero)}",
            f"max_column_abs_sum={self.max_column_abs_sum}",
            f"unsigned_max_abs_entry={self.unsigned_max_abs_entry}",
            f"reduces_mod2={int(self.reduces_to_tensor)}",
        ]


def _int_tensor(X: ChainComplex, Y: ChainComplex, signed: bool) -> IntChainComplex:
    cx, cy = X.cells, Y.cells
    r = X.top_grade + Y.top_grade
    cells = tuple(sum(cx[p] * cy[q] for p, q, _ in _blocks(cx, cy, k)) for k in range(r + 1))
    bd = {}
    for k in range(1, r + 1):
        M = np.zeros((cells[k - 1], cells[k]), dtype=np.int64)
        rows_blocks = {p: off for p, _, off in _blocks(cx, cy, k - 1)}
        for p, q, off in _blocks(cx, cy, k):
            if p >= 1 and (p - 1) in rows_blocks:
                blk = np.kron(X.d(p).to_dense().astype(np.int64), np.eye(cy[q], dtype=np.int64))
                ro = rows_blocks[p - 1]
                M[ro : ro + blk.shape[0], off : off + blk.shape[1]] += blk
            if q >= 1 and p in rows_blocks:
                sign = -1 if (signed and p % 2) else 1
                blk = sign * np.kron(np.eye(cx[p], dtype=np.int64), Y.d(q).to_dense().astype(np.int64))
                ro = rows_blocks[p]
                M[ro : ro + blk.shape[0], off : off + blk.shape[1]] += blk
        bd[k] = IntMatrix(M)
    return IntChainComplex(cells, bd)


def z_lift_tensor(X: ChainComplex, Y: ChainComplex) -> tuple[IntChainComplex, LiftReport]:
    """Naive integer lift of two classical complexes and the signed product boundary."""
    for F in (X, Y):
        if F.top_grade != 1:
            raise PreconditionError("z_lift_tensor expects two-term complexes")
    signed = _int_tensor(X, Y, True)
    unsigned = _int_tensor(X, Y, False)
    comp = signed.compositions()[1]
    ucomp = unsigned.compositions()[1]
    P = tensor_product(X, Y)
    reduces = all(signed.boundary[k].mod2() == P.d(k) for k in signed.boundary)
    report = LiftReport(
        exact_zero=comp.is_zero(),
        composition=comp,
        max_column_abs_sum=max(m.max_column_abs_sum() for m in signed.boundary.values()),
        unsigned_composition=ucomp,
        unsigned_max_abs_entry=int(np.abs(ucomp.array).max()) if ucomp.array.size else 0,
        reduces_to_tensor=reduces,
    )
    return signed, report


# ---------------------------------------------------------------------------
# balanced products


def _check_action(X: ChainComplex, act: Mapping[int, np.ndarray], ell: int, name: str) -> dict[int, np.ndarray]:
    out = {}
    for k in range(X.top_grade + 1):
        if k not in act:
            raise PreconditionError(f"{name}: no action given at grade {k}")
        perm = np.asarray(act[k], dtype=np.int64)
        if perm.shape != (X.n(k),) or sorted(perm.tolist()) != list(range(X.n(k))):
            raise PreconditionError(f"{name}: grade {k} action is not a permutation")
        g = np.arange(X.n(k))
        for step in range(1, ell + 1):
            g = perm[g]
            if step < ell and X.n(k) and np.any(g == np.arange(X.n(k))):
                raise PreconditionError(f"{name}: action is not free at grade {k}")
        if not np.array_equal(g, np.arange(X.n(k))):
            raise PreconditionError(f"{name}: action does not have order dividing {ell}")
        out[k] = perm
    for k in range(1, X.top_grade + 1):
        D = X.d(k)
        moved = {(int(out[k - 1][a]), int(out[k][b])) for a, b in D.entries()}
        if moved != set(D.entries()):
            raise PreconditionError(f"{name}: action does not commute with boundary {k}")
    return out


def balanced_product(
    X: ChainComplex,
    Y: ChainComplex,
    ell: int,
    actions: tuple[Mapping[int, np.ndarray], Mapping[int, np.ndarray]],
) -> tuple[ChainComplex, LiftReport]:
    """Quotient of ``X (x) Y`` by ``(x g, y) ~ (x, g y)`` for a free cyclic group.

    ``actions[0][k]`` is the generator permutation on grade-``k`` cells of ``X``;
    likewise for ``Y``. Returns the quotient complex and a report on the signed
    integer lift of its boundary.
    """
    if ell < 1:
        raise InputError("group order must be positive")
    ax = _check_action(X, actions[0], ell, "left factor")
    ay = _check_action(Y, actions[1], ell, "right factor")
    inv_y = {k: np.argsort(p) for k, p in ay.items()}
    cx, cy = X.cells, Y.cells
    r = X.top_grade + Y.top_grade

    # orbit of (x, y) under (x, y) -> (g x, g^-1 y); representative = min pair
    rep_index: list[dict[tuple[int, int, int], int]] = []
    reps: list[list[tuple[int, int, int]]] = []
    for k in range(r + 1):
        idx: dict[tuple[int, int, int], int] = {}
        order: list[tuple[int, int, int]] = []
        for p, q, _ in _blocks(cx, cy, k):
            for x in range(cx[p]):
                for y in range(cy[q]):
                    orbit = []
                    a, b = x, y
                    for _ in range(ell):
                        orbit.append((a, b))
                        a, b = int(ax[p][a]), int(inv_y[q][b])
                    rep = min(orbit)
                    if rep == (x, y):
                        order.append((p, x, y))
                    for pair in orbit:
                        idx.setdefault((p, pair[0], pair[1]), -1)
        pos = {cell: i for i, cell in enumerate(order)}
        # fill orbit -> rep index
        for p, x, y in order:
            q = k - p
            a, b = x, y
            for _ in range(ell):
                idx[(p, a, b)] = pos[(p, x, y)]
                a, b = int(ax[p][a]), int(inv_y[q][b])
        rep_index.append(idx)
        reps.append(order)
    cells = tuple(len(o) for o in reps)
    if any(cells[k] * ell != sum(cx[p] * cy[q] for p, q, _ in _blocks(cx, cy, k)) for k in range(r + 1)):
        raise InvariantError("orbit sizes are not uniform")

    bd = {}
    lifted = {}
    for k in range(1, r + 1):
        M = np.zeros((cells[k - 1], cells[k]), dtype=np.int64)
        for col, (p, x, y) in enumerate(reps[k]):
            q = k - p
            if p >= 1:
                for a in X.d(p).T.row_support(x):
                    M[rep_index[k - 1][(p - 1, a, y)], col] += 1
            if q >= 1:
                sign = -1 if p % 2 else 1
                for b in Y.d(q).T.row_support(y):
                    M[rep_index[k - 1][(p, x, b)], col] += sign
        lifted[k] = IntMatrix(M)
        bd[k] = BitMatrix.from_dense(M & 1)
    labels = tuple(
        tuple(f"({X.label(p, x)},{Y.label(k - p, y)})" for p, x, y in reps[k]) for k in range(r + 1)
    )
    Q = ChainComplex(cells, bd, labels)
    comps = [lifted[k] @ lifted[k + 1] for k in range(1, r)]
    zero = IntMatrix(np.zeros((cells[0], cells[2]) if r >= 2 else (0, 0), dtype=np.int64))
    comp = comps[0] if comps else zero
    report = LiftReport(
        exact_zero=all(c.is_zero() for c in comps),
        composition=comp,
        max_column_abs_sum=max((m.max_column_abs_sum() for m in lifted.values()), default=0),
        unsigned_composition=zero,
        unsigned_max_abs_entry=0,
        reduces_to_tensor=all(lifted[k].mod2() == Q.d(k) for k in lifted),
    )
    return Q, report
