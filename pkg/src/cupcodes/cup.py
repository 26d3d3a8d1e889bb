"""Cup products on ordered simplicial (Delta) complexes and on CW complexes via rule tables.

Simplicial evaluation uses the front/back face rule on ordered simplices:
``(a u b)[v0..v_{p+q}] = a[v0..vp] * b[vp..v_{p+q}]``. CW complexes carry an
explicit :class:`CupRule` listing, for each target cell, the pairs of cells
whose value products are summed mod 2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .complex import ChainComplex, HomologyBasis, cohomology_basis, dual_pair_bases, homology_basis
from .constructors import _blocks, circle, point, tensor_product
from .cw import CWDouble
from .errors import InputError, PreconditionError, UnsupportedGradeError
from .gf2 import BitMatrix, BitVector, kernel_matrix, solve
from .tensor import LogicalActionTensor

__all__ = [
    "Cochain",
    "SimplicialComplex",
    "CupRule",
    "CupRuleReport",
    "FactorClasses",
    "torus_triangulation",
    "coordinate_cocycle",
    "fundamental_cycle",
    "simplicial_cup",
    "k_fold_cup",
    "cw_cup_eval",
    "circle_rule",
    "point_rule",
    "torus_rule",
    "product_cup_rule",
    "validate_cup_rule",
    "triple_tensor",
    "factor_classes",
    "kunneth_triple_tensor",
    "format_rule",
    "parse_rule",
    "format_cochains",
    "parse_cochains",
]


# ---------------------------------------------------------------------------
# cochains


@dataclass(frozen=True)
class Cochain:
    """A cochain: a bit value on every cell of one grade."""

    grade: int
    values: BitVector

    @classmethod
    def from_dense(cls, grade: int, bits) -> "Cochain":
        return cls(grade, BitVector.from_dense(np.asarray(bits)))

    @classmethod
    def zeros(cls, grade: int, length: int) -> "Cochain":
        return cls(grade, BitVector.zeros(length))

    def dense(self) -> np.ndarray:
        return self.values.to_dense()

    @property
    def length(self) -> int:
        return self.values.length

    def __add__(self, other: "Cochain") -> "Cochain":
        if self.grade != other.grade:
            raise InputError("cannot add cochains of different grades")
        return Cochain(self.grade, self.values + other.values)


def _as_cochain(c, grade: int | None = None) -> Cochain:
    if isinstance(c, Cochain):
        return c
    if isinstance(c, BitVector):
        if grade is None:
            raise InputError("grade required to interpret a BitVector as a cochain")
        return Cochain(grade, c)
    raise InputError(f"expected Cochain, got {type(c).__name__}")


def coboundary(X: ChainComplex, c: Cochain) -> Cochain:
    """``d c = d(k+1)^T c``."""
    D = X.d(c.grade + 1)
    if c.length != D.rows:
        raise InputError("cochain length does not match its grade")
    return Cochain.from_dense(c.grade + 1, D.T.apply(c.dense()) if D.cols else np.zeros(0, np.uint8))


# ---------------------------------------------------------------------------
# ordered simplicial (Delta) complexes


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """Ordered simplices with explicit face maps.

    ``simplices[k]`` is a ``(count, k+1)`` array of vertex ids listed in the
    simplex's vertex order. ``faces[k][s, i]`` is the grade ``k-1`` index of the
    face omitting vertex ``i``. Storing faces explicitly admits Delta-complexes
    where several simplices share a vertex set (small periodic lattices).
    """

    simplices: tuple[np.ndarray, ...]
    faces: tuple[np.ndarray, ...]
    labels: tuple[tuple[str, ...], ...] | None = None
    lattice: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if len(self.simplices) != len(self.faces):
            raise InputError("one face table per grade required")
        for k, (S, F) in enumerate(zip(self.simplices, self.faces)):
            if S.ndim != 2 or S.shape[1] != k + 1:
                raise InputError(f"grade {k} simplices must have {k + 1} vertices")
            if k == 0:
                continue
            if F.shape != (S.shape[0], k + 1):
                raise InputError(f"grade {k} face table has wrong shape")
            if F.size and (F.min() < 0 or F.max() >= self.simplices[k - 1].shape[0]):
                raise InputError(f"grade {k} face index out of range")
            for i in range(k + 1):
                keep = [j for j in range(k + 1) if j != i]
                if not np.array_equal(self.simplices[k - 1][F[:, i]], S[:, keep]):
                    raise InputError(f"grade {k} face {i} does not match its vertex list")

    @property
    def top_grade(self) -> int:
        return len(self.simplices) - 1

    @property
    def n_vertices(self) -> int:
        return self.simplices[0].shape[0]

    def count(self, k: int) -> int:
        return self.simplices[k].shape[0] if 0 <= k <= self.top_grade else 0

    @property
    def chain_complex(self) -> ChainComplex:
        cached = self.__dict__.get("_cc")
        if cached is None:
            bd = {}
            for k in range(1, self.top_grade + 1):
                F = self.faces[k]
                rows = F.ravel()
                cols = np.repeat(np.arange(F.shape[0]), k + 1)
                dense = np.zeros((self.count(k - 1), self.count(k)), dtype=np.int64)
                np.add.at(dense, (rows, cols), 1)
                bd[k] = BitMatrix.from_dense(dense & 1)
            cells = tuple(self.count(k) for k in range(self.top_grade + 1))
            faces = {k: self.faces[k] for k in range(1, self.top_grade + 1)}
            cached = ChainComplex(cells, bd, self.labels, faces)
            object.__setattr__(self, "_cc", cached)
        return cached

    def sub_face(self, k: int, a: int, b: int) -> np.ndarray:
        """For every grade-``k`` simplex, the index of its sub-simplex ``[v_a..v_b]``."""
        if not 0 <= a <= b <= k:
            raise InputError("invalid vertex range")
        idx = np.arange(self.count(k))
        cur = k
        while cur > b:
            idx = self.faces[cur][idx, cur]
            cur -= 1
        for _ in range(a):
            idx = self.faces[cur][idx, 0]
            cur -= 1
        return idx

    @classmethod
    def from_maximal(cls, maximal: Iterable[Sequence[int]]) -> "SimplicialComplex":
        """Closure of a list of simplices; vertex order is the integer order."""
        top: set[tuple[int, ...]] = set()
        for s in maximal:
            t = tuple(sorted(int(v) for v in s))
            if len(set(t)) != len(t):
                raise InputError("repeated vertex in simplex")
            top.add(t)
        if not top:
            raise InputError("empty complex")
        dim = max(len(t) for t in top) - 1
        by_grade: list[set[tuple[int, ...]]] = [set() for _ in range(dim + 1)]
        for t in top:
            for k in range(len(t)):
                for sub in itertools.combinations(t, k + 1):
                    by_grade[k].add(sub)
        simplices = [sorted(g) for g in by_grade]
        index = [{s: i for i, s in enumerate(g)} for g in simplices]
        arrays = [np.asarray(g, dtype=np.int64).reshape(len(g), k + 1) for k, g in enumerate(simplices)]
        faces = [np.zeros((len(simplices[0]), 1), dtype=np.int64)]
        for k in range(1, dim + 1):
            F = np.asarray(
                [[index[k - 1][s[:i] + s[i + 1 :]] for i in range(k + 1)] for s in simplices[k]], dtype=np.int64
            ).reshape(len(simplices[k]), k + 1)
            faces.append(F)
        labels = tuple(tuple("-".join(map(str, s)) for s in g) for g in simplices)
        return cls(tuple(arrays), tuple(faces), labels)

    @classmethod
    def from_chain_complex(cls, X: ChainComplex) -> "SimplicialComplex":
        """Rebuild from a complex carrying face tables (e.g. a parsed chc file)."""
        if X.faces is None or 0 in X.faces:
            raise InputError("complex carries no face tables")
        verts = [np.arange(X.n(0), dtype=np.int64).reshape(-1, 1)]
        faces = [np.zeros((X.n(0), 1), dtype=np.int64)]
        for k in range(1, X.top_grade + 1):
            F = np.asarray(X.faces.get(k), dtype=np.int64)
            if F is None or F.shape != (X.n(k), k + 1):
                raise InputError(f"missing or malformed faces at grade {k}")
            prev = verts[k - 1]
            # vertices of s = vertices of (face omitting last) + last vertex of (face omitting first)
            V = np.hstack([prev[F[:, k]], prev[F[:, 0]][:, -1:]])
            verts.append(V)
            faces.append(F)
        lattice = _infer_lattice(X.labels) if X.labels is not None else None
        K = cls(tuple(verts), tuple(faces), X.labels, lattice)
        if not K.chain_complex.same_structure(X):
            raise InputError("face tables do not reproduce the boundary maps")
        return K


def _infer_lattice(labels) -> tuple[int, int] | None:
    try:
        coords = [tuple(int(t) for t in s.split("|")[0].split(".")) for s in labels[0]]
    except (ValueError, IndexError):
        return None
    if not coords or any("|" not in s for s in labels[0]):
        return None
    dim = len(coords[0])
    return (dim, max(max(c) for c in coords) + 1)


def _chains(dim: int, k: int) -> list[tuple[frozenset, ...]]:
    """All strictly increasing chains of k non-empty subsets of range(dim)."""
    subsets = [frozenset(c) for r in range(1, dim + 1) for c in itertools.combinations(range(dim), r)]
    out = []

    def extend(chain):
        if len(chain) == k:
            out.append(tuple(chain))
            return
        for s in subsets:
            if not chain or (chain[-1] < s):
                extend(chain + [s])

    extend([])
    return out


def _chain_text(chain) -> str:
    return "/".join("".join(str(i) for i in sorted(s)) for s in chain)


def torus_triangulation(dim: int, L: int) -> SimplicialComplex:
    """Freudenthal (Kuhn) subdivision of the periodic ``L^dim`` cubical lattice.

    Each simplex is a base vertex ``x`` plus a chain ``S1 < S2 < ... < Sk`` of
    coordinate sets; its vertices are ``x, x + 1_{S1}, ..., x + 1_{Sk}`` in that
    order, which is increasing in the covering lattice.
    """
    if dim not in (2, 3):
        raise InputError("torus_triangulation supports dim 2 or 3")
    if L < 2:
        raise InputError("torus_triangulation needs L >= 2")
    bases = list(itertools.product(range(L), repeat=dim))
    vid = {x: i for i, x in enumerate(bases)}

    def shift(x, s):
        return tuple((x[i] + (1 if i in s else 0)) % L for i in range(dim))

    simplices, faces, labels = [], [], []
    index: list[dict] = []
    for k in range(dim + 1):
        chains = _chains(dim, k)
        keys = [(x, c) for x in bases for c in chains]
        index.append({key: i for i, key in enumerate(keys)})
        V = np.asarray([[vid[x]] + [vid[shift(x, s)] for s in c] for x, c in keys], dtype=np.int64).reshape(
            len(keys), k + 1
        )
        simplices.append(V)
        labels.append(tuple(".".join(map(str, x)) + "|" + _chain_text(c) for x, c in keys))
        if k == 0:
            faces.append(np.zeros((len(keys), 1), dtype=np.int64))
            continue
        F = np.zeros((len(keys), k + 1), dtype=np.int64)
        for row, (x, c) in enumerate(keys):
            s1 = c[0]
            F[row, 0] = index[k - 1][(shift(x, s1), tuple(s - s1 for s in c[1:]))]
            for i in range(1, k + 1):
                F[row, i] = index[k - 1][(x, c[: i - 1] + c[i:])]
        faces.append(F)
    return SimplicialComplex(tuple(simplices), tuple(faces), tuple(labels), (dim, L))


def coordinate_cocycle(K: SimplicialComplex, axis: int) -> Cochain:
    """1-cocycle counting crossings of the seam ``x_axis = L-1 -> 0``."""
    if K.lattice is None or K.labels is None:
        raise InputError("coordinate cocycles need a lattice triangulation")
    dim, L = K.lattice
    if not 0 <= axis < dim:
        raise InputError("axis out of range")
    vals = np.zeros(K.count(1), dtype=np.uint8)
    for e, lab in enumerate(K.labels[1]):
        base, chain = lab.split("|")
        x = [int(t) for t in base.split(".")]
        if str(axis) in chain and x[axis] == L - 1:
            vals[e] = 1
    return Cochain.from_dense(1, vals)


def fundamental_cycle(X: ChainComplex | SimplicialComplex) -> BitVector:
    """Sum of all top-grade cells (checked to be a cycle)."""
    C = X.chain_complex if isinstance(X, SimplicialComplex) else X
    r = C.top_grade
    v = BitVector(C.n(r), tuple(range(C.n(r))))
    if C.d(r).apply(v.to_dense()).any():
        raise PreconditionError("sum of top cells is not a cycle")
    return v


def simplicial_cup(alpha: Cochain, beta: Cochain, K: SimplicialComplex) -> Cochain:
    """Front-face / back-face cup product."""
    p, q = alpha.grade, beta.grade
    if alpha.length != K.count(p) or beta.length != K.count(q):
        raise InputError("cochain lengths do not match the complex")
    n = p + q
    if n > K.top_grade:
        return Cochain.zeros(n, 0)
    front = K.sub_face(n, 0, p)
    back = K.sub_face(n, p, n)
    return Cochain.from_dense(n, alpha.dense()[front] & beta.dense()[back])


def k_fold_cup(cochains: Sequence[Cochain], K: SimplicialComplex) -> Cochain:
    """Left-nested cup of several cochains."""
    if not cochains:
        raise InputError("need at least one cochain")
    out = cochains[0]
    for c in cochains[1:]:
        out = simplicial_cup(out, c, K)
    return out


# ---------------------------------------------------------------------------
# CW rule tables


Terms = tuple[np.ndarray, np.ndarray, np.ndarray]  # target, p-cell, q-cell


def _canonical_terms(t: np.ndarray, a: np.ndarray, b: np.ndarray) -> Terms:
    """Sort terms and cancel repeated ones mod 2."""
    t, a, b = (np.asarray(x, dtype=np.int64) for x in (t, a, b))
    if t.size == 0:
        z = np.zeros(0, np.int64)
        return z, z.copy(), z.copy()
    stacked = np.stack([t, a, b], axis=1)
    uniq, counts = np.unique(stacked, axis=0, return_counts=True)
    keep = uniq[counts % 2 == 1]
    return keep[:, 0].copy(), keep[:, 1].copy(), keep[:, 2].copy()


@dataclass(frozen=True, eq=False)
class CupRule:
    """Per-cell cup evaluation table on a chain complex."""

    domain: ChainComplex
    table: Mapping[tuple[int, int], Terms]

    def __post_init__(self) -> None:
        X = self.domain
        clean = {}
        for (p, q), terms in self.table.items():
            if p < 0 or q < 0 or p + q > X.top_grade:
                raise InputError(f"rule grades ({p},{q}) outside the complex")
            t, a, b = _canonical_terms(*terms)
            for arr, n, what in ((t, X.n(p + q), "target"), (a, X.n(p), "p-cell"), (b, X.n(q), "q-cell")):
                if arr.size and (arr.min() < 0 or arr.max() >= n):
                    raise InputError(f"rule ({p},{q}) references a missing {what}")
            clean[(int(p), int(q))] = (t, a, b)
        object.__setattr__(self, "table", dict(sorted(clean.items())))

    @classmethod
    def from_lists(cls, domain: ChainComplex, lists: Mapping[tuple[int, int], Sequence[Sequence[tuple[int, int]]]]) -> "CupRule":
        """Build from ``{(p, q): [terms of target 0, terms of target 1, ...]}``."""
        table = {}
        for key, per_cell in lists.items():
            t = [c for c, terms in enumerate(per_cell) for _ in terms]
            a = [x for terms in per_cell for x, _ in terms]
            b = [y for terms in per_cell for _, y in terms]
            table[key] = (np.asarray(t), np.asarray(a), np.asarray(b))
        return cls(domain, table)

    def covers(self, p: int, q: int) -> bool:
        return (p, q) in self.table

    def terms(self, p: int, q: int) -> list[list[tuple[int, int]]]:
        """Per target cell, the list of ``(p-cell, q-cell)`` pairs."""
        if (p, q) not in self.table:
            raise UnsupportedGradeError(f"rule has no entry for grades ({p},{q})")
        t, a, b = self.table[(p, q)]
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.domain.n(p + q))]
        for ti, ai, bi in zip(t.tolist(), a.tolist(), b.tolist()):
            out[ti].append((ai, bi))
        return out

    def without_term(self, p: int, q: int, position: int) -> "CupRule":
        """Copy with one term removed (for negative tests)."""
        t, a, b = self.table[(p, q)]
        keep = np.ones(t.size, dtype=bool)
        keep[position] = False
        table = dict(self.table)
        table[(p, q)] = (t[keep], a[keep], b[keep])
        return CupRule(self.domain, table)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CupRule):
            return NotImplemented
        if set(self.table) != set(other.table) or self.domain.cells != other.domain.cells:
            return False
        return all(all(np.array_equal(x, y) for x, y in zip(self.table[k], other.table[k])) for k in self.table)


def cw_cup_eval(rule: CupRule, alpha: Cochain, beta: Cochain) -> Cochain:
    p, q = alpha.grade, beta.grade
    if (p, q) not in rule.table:
        raise UnsupportedGradeError(f"rule has no entry for grades ({p},{q})")
    X = rule.domain
    if alpha.length != X.n(p) or beta.length != X.n(q):
        raise InputError("cochain lengths do not match the rule's complex")
    t, a, b = rule.table[(p, q)]
    vals = alpha.dense()[a] & beta.dense()[b]
    out = np.bincount(t, weights=vals, minlength=X.n(p + q)).astype(np.int64) & 1
    return Cochain.from_dense(p + q, out.astype(np.uint8))


def point_rule() -> CupRule:
    return CupRule.from_lists(point(), {(0, 0): [[(0, 0)]]})


def circle_rule(L: int = 1) -> CupRule:
    """Cup rule on :func:`circle` with edges oriented ``v_i -> v_{i+1}``."""
    X = circle(L)
    return CupRule.from_lists(
        X,
        {
            (0, 0): [[(i, i)] for i in range(L)],
            (0, 1): [[(i, i)] for i in range(L)],
            (1, 0): [[(i, (i + 1) % L)] for i in range(L)],
        },
    )


def _grade_offsets(cx: Sequence[int], cy: Sequence[int], k: int) -> dict[int, int]:
    return {p: off for p, _, off in _blocks(cx, cy, k)}


def product_cup_rule(rule_x: CupRule, rule_y: CupRule) -> CupRule:
    """Tensor-induced rule ``(a x b) u (c x d) = (a u c) x (b u d)`` on the product complex."""
    X, Y = rule_x.domain, rule_y.domain
    if X.top_grade < 0 or Y.top_grade < 0:
        raise InputError("factor rules need valid domains")
    P = tensor_product(X, Y)
    cx, cy = X.cells, Y.cells
    table = {}
    for p in range(P.top_grade + 1):
        for q in range(P.top_grade + 1 - p):
            ts, as_, bs = [], [], []
            complete = True
            for gx, gy, t_off in _blocks(cx, cy, p + q):
                for p1 in range(0, p + 1):
                    p2, q1 = p - p1, gx - p1
                    q2 = gy - p2
                    if q1 < 0 or q2 < 0 or p1 > X.top_grade or p2 > Y.top_grade:
                        continue
                    if not (rule_x.covers(p1, q1) and rule_y.covers(p2, q2)):
                        complete = False
                        continue
                    tx, ax, bx = rule_x.table[(p1, q1)]
                    ty, ay, by = rule_y.table[(p2, q2)]
                    if tx.size == 0 or ty.size == 0:
                        continue
                    po = _grade_offsets(cx, cy, p)[p1]
                    qo = _grade_offsets(cx, cy, q)[q1]
                    ts.append((t_off + tx[:, None] * cy[gy] + ty[None, :]).ravel())
                    as_.append((po + ax[:, None] * cy[p2] + ay[None, :]).ravel())
                    bs.append((qo + bx[:, None] * cy[q2] + by[None, :]).ravel())
            if complete:
                cat = lambda xs: np.concatenate(xs) if xs else np.zeros(0, np.int64)
                table[(p, q)] = (cat(ts), cat(as_), cat(bs))
    return CupRule(P, table)


def torus_rule() -> CupRule:
    """Rule on the one-vertex torus: ``circle(1) x circle(1)``."""
    return product_cup_rule(circle_rule(1), circle_rule(1))


# ---------------------------------------------------------------------------
# rule validation


@dataclass(frozen=True)
class CupRuleReport:
    passed: bool
    trials: int
    checks: int
    failure: str | None = None

    def lines(self) -> list[str]:
        out = [f"passed={int(self.passed)}", f"trials={self.trials}", f"checks={self.checks}"]
        if self.failure:
            out.append(f"failure={self.failure}")
        return out


def _random_cochain(rng, n: int) -> np.ndarray:
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def _random_cocycle(rng, X: ChainComplex, k: int) -> np.ndarray:
    Z = kernel_matrix(X.d(k + 1).T.to_dense()) if X.n(k) else np.zeros((0, 0), np.uint8)
    if Z.shape[0] == 0:
        return np.zeros(X.n(k), dtype=np.uint8)
    coeff = rng.integers(0, 2, size=Z.shape[0])
    return ((coeff @ Z.astype(np.int64)) & 1).astype(np.uint8)


def _cob(X: ChainComplex, k: int, v: np.ndarray) -> np.ndarray:
    """Coboundary of a grade-``k`` cochain given densely."""
    D = X.d(k + 1)
    if D.cols == 0:
        return np.zeros(0, dtype=np.uint8)
    if D.rows == 0:
        return np.zeros(D.cols, dtype=np.uint8)
    return D.T.apply(v)


def validate_cup_rule(rule: CupRule, trials: int = 200, seed: int = 0) -> CupRuleReport:
    """Randomized checks that a rule behaves as a cup product.

    Checks the Leibniz identity on cochains, and on top-grade homology cycles
    the invariance of integrals under coboundary shifts, graded commutativity
    and the unit law (the latter two catch corruptions on complexes whose
    coboundaries all vanish, where Leibniz is vacuous).
    """
    X = rule.domain
    r = X.top_grade
    rng = np.random.default_rng(seed)
    ev = lambda a, p, b, q: cw_cup_eval(rule, Cochain.from_dense(p, a), Cochain.from_dense(q, b)).dense()
    checks = 0
    tops = [v.to_dense() for v in homology_basis(X, r).representatives]
    for trial in range(trials):
        for (p, q) in list(rule.table):
            n = p + q
            if n + 1 <= r and rule.covers(p + 1, q) and rule.covers(p, q + 1):
                a, b = _random_cochain(rng, X.n(p)), _random_cochain(rng, X.n(q))
                lhs = _cob(X, n, ev(a, p, b, q))
                rhs = ev(_cob(X, p, a), p + 1, b, q) ^ ev(a, p, _cob(X, q, b), q + 1)
                checks += 1
                if not np.array_equal(lhs, rhs):
                    cell = int(np.flatnonzero(lhs ^ rhs)[0])
                    return CupRuleReport(False, trial + 1, checks, f"leibniz ({p},{q}) cell {cell} grade {n + 1}")
            if n != r or not tops:
                continue
            a, b = _random_cocycle(rng, X, p), _random_cocycle(rng, X, q)
            base = ev(a, p, b, q)
            integral = lambda v: [int(v @ z) & 1 for z in tops]
            ref = integral(base.astype(np.int64))
            if p >= 1:
                shifted = a ^ _cob(X, p - 1, _random_cochain(rng, X.n(p - 1)))
                checks += 1
                if integral(ev(shifted, p, b, q).astype(np.int64)) != ref:
                    return CupRuleReport(False, trial + 1, checks, f"coboundary-shift ({p},{q}) left")
            if q >= 1:
                shifted = b ^ _cob(X, q - 1, _random_cochain(rng, X.n(q - 1)))
                checks += 1
                if integral(ev(a, p, shifted, q).astype(np.int64)) != ref:
                    return CupRuleReport(False, trial + 1, checks, f"coboundary-shift ({p},{q}) right")
            if rule.covers(q, p):
                checks += 1
                if integral(ev(b, q, a, p).astype(np.int64)) != ref:
                    return CupRuleReport(False, trial + 1, checks, f"commutativity ({p},{q})")
        for (p, q) in rule.table:
            if p == 0 and X.n(0):
                one = np.ones(X.n(0), dtype=np.uint8)
                if _cob(X, 0, one).any():
                    continue
                a = _random_cocycle(rng, X, q)
                diff = ev(one, 0, a, q) ^ a
                checks += 1
                if diff.any() and solve(X.d(q).T, BitVector.from_dense(diff)) is None:
                    return CupRuleReport(False, trial + 1, checks, f"unit (0,{q})")
    return CupRuleReport(True, trials, checks)


# ---------------------------------------------------------------------------
# integration and tensors


Evaluator = Union[SimplicialComplex, CupRule]


def _domain(ev: Evaluator) -> ChainComplex:
    return ev.chain_complex if isinstance(ev, SimplicialComplex) else ev.domain


def evaluate_cup(ev: Evaluator, cochains: Sequence[Cochain]) -> Cochain:
    """Left-nested cup using either evaluator."""
    if isinstance(ev, SimplicialComplex):
        return k_fold_cup(cochains, ev)
    out = cochains[0]
    for c in cochains[1:]:
        out = cw_cup_eval(ev, out, c)
    return out


def check_cycle(X: ChainComplex, sigma: BitVector, k: int) -> None:
    if sigma.length != X.n(k):
        raise InputError(f"cycle length {sigma.length} does not match grade {k}")
    if X.d(k).apply(sigma.to_dense()).any() if X.d(k).rows else False:
        raise PreconditionError("sigma is not a cycle")


def _basis_cochains(basis, grade: int) -> list[Cochain]:
    if isinstance(basis, HomologyBasis):
        return [Cochain(basis.grade, v) for v in basis.representatives]
    return [_as_cochain(c, grade) for c in basis]


def _basis_labels(basis, axis: int) -> tuple[str, ...]:
    if isinstance(basis, HomologyBasis):
        return basis.labels()
    return tuple(f"{axis}:{i}" for i in range(len(basis)))


def triple_tensor(
    ev: Evaluator,
    bases: Sequence,
    sigma: BitVector,
    grades: Sequence[int] | None = None,
    *,
    spot_checks: int = 0,
    seed: int = 0,
) -> LogicalActionTensor:
    """``T[i, j, k] = <sigma, alpha_i u beta_j u gamma_k>``, evaluated entry by entry.

    Works for any number of slots (two gives the CZ pairing table). With
    ``spot_checks > 0`` every entry is recomputed that many times after random
    coboundary shifts of its representatives and must not change.
    """
    X = _domain(ev)
    if grades is None:
        grades = [b.grade if isinstance(b, HomologyBasis) else b[0].grade for b in bases]
    grades = list(grades)
    n = sum(grades)
    if n > X.top_grade:
        raise InputError("grades exceed the top grade")
    check_cycle(X, sigma, n)
    lists = [_basis_cochains(b, g) for b, g in zip(bases, grades)]
    for lst, g in zip(lists, grades):
        for c in lst:
            if c.grade != g or c.length != X.n(g):
                raise InputError("basis cochain does not live at its grade")
    s = sigma.to_dense().astype(np.int64)
    rng = np.random.default_rng(seed)
    shape = tuple(len(l) for l in lists)
    T = np.zeros(shape, dtype=np.uint8)
    for idx in itertools.product(*(range(d) for d in shape)):
        chosen = [lists[a][i] for a, i in enumerate(idx)]
        val = int(evaluate_cup(ev, chosen).dense().astype(np.int64) @ s) & 1
        T[idx] = val
        for _ in range(spot_checks):
            moved = []
            for c in chosen:
                if c.grade >= 1:
                    chi = _random_cochain(rng, X.n(c.grade - 1))
                    moved.append(Cochain.from_dense(c.grade, c.dense() ^ _cob(X, c.grade - 1, chi)))
                else:
                    moved.append(c)
            if int(evaluate_cup(ev, moved).dense().astype(np.int64) @ s) & 1 != val:
                raise PreconditionError(f"entry {idx} changes under a coboundary shift")
    labels = tuple(_basis_labels(b, a) for a, b in enumerate(bases))
    return LogicalActionTensor(T, labels)


# ---------------------------------------------------------------------------
# Künneth factorization of triple integrals on mirror doubles


@dataclass(frozen=True, eq=False)
class FactorClasses:
    """Named cohomology classes of one Poincaré-paired factor.

    ``integral(x, y, z)`` is the triple integral over the fundamental class when
    it can be computed from the pairing alone (one slot is the unit), ``0`` when
    the grades do not add up to ``r``, and ``-1`` (unknown) otherwise.
    """

    r: int
    labels: tuple[str, ...]
    grades: tuple[int, ...]
    cocycles: tuple[np.ndarray | None, ...]
    unit: str

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"unknown factor class {label!r}") from None

    def integral(self, x: str, y: str, z: str) -> int:
        ids = [self.index(l) for l in (x, y, z)]
        if sum(self.grades[i] for i in ids) != self.r:
            return 0
        rest = [i for i in ids if self.labels[i] != self.unit]
        if len(rest) == 3:
            return -1
        if len(rest) == 1:
            # unit u unit u w with w at the top grade
            rest = [self.index(self.unit), rest[0]]
        v, w = (self.cocycles[i] for i in rest)
        if v is None or w is None:
            return -1
        # the mirror of w is a cycle at the grade of v; integrate by overlap parity
        return int(v.astype(np.int64) @ w.astype(np.int64)) & 1

    def tensor(self) -> np.ndarray:
        m = len(self.labels)
        T = np.zeros((m, m, m), dtype=np.int8)
        for i, j, k in itertools.product(range(m), repeat=3):
            T[i, j, k] = self.integral(self.labels[i], self.labels[j], self.labels[k])
        return T


def factor_classes(double: CWDouble | ChainComplex, *, formal_unit: str | None = None) -> FactorClasses:
    """Dual-paired cohomology classes of a mirror double.

    For each grade ``k < r - k`` with classes, the cohomology basis at ``k``
    (labels ``u{k}.{i}``) is paired with the mirror images of the dual homology
    basis (labels ``u*{r-k}.{i}``). Grade 0 of a connected double gives the unit
    ``c0``. A minimal double without grade-0 cells can be given a formal unit.
    """
    C = double.complex if isinstance(double, CWDouble) else double
    r = C.top_grade
    labels: list[str] = []
    grades: list[int] = []
    vecs: list[np.ndarray | None] = []
    unit = formal_unit or "c0"
    for k in range(r // 2 + 1):
        mk = r - k
        if C.n(k) != C.n(mk):
            raise PreconditionError(f"grades {k} and {mk} do not mirror each other")
        hom = homology_basis(C, k)
        if hom.betti == 0:
            continue
        coh = cohomology_basis(C, k)
        hom, coh = dual_pair_bases(hom, coh, C)
        for i, v in enumerate(coh.representatives):
            lab = "c0" if (k == 0 and hom.betti == 1) else f"u{k}.{i}"
            labels.append(lab)
            grades.append(k)
            vecs.append(v.to_dense())
        if mk == k:
            continue
        for i, v in enumerate(hom.representatives):
            lab = f"c*{r}" if (k == 0 and hom.betti == 1) else f"u*{mk}.{i}"
            labels.append(lab)
            grades.append(mk)
            vecs.append(v.to_dense())
    if formal_unit is not None:
        if C.n(0):
            raise PreconditionError("formal unit only for doubles without grade-0 cells")
        labels.insert(0, formal_unit)
        grades.insert(0, 0)
        vecs.insert(0, None)
    elif "c0" not in labels:
        raise PreconditionError("double is not connected; no unit class")
    # unit cocycle must be the all-ones 0-cochain for the pairing shortcut
    if formal_unit is None:
        u = vecs[labels.index("c0")]
        if not np.all(u == 1):
            raise PreconditionError("grade-0 class is not the unit")
    return FactorClasses(r, tuple(labels), tuple(grades), tuple(vecs), unit)


def kunneth_triple_tensor(
    factors: Sequence[FactorClasses],
    classes: Sequence[Sequence[Sequence[str]]],
) -> LogicalActionTensor:
    """Triple integrals on a product from factor integrals.

    ``classes[a]`` lists the product classes of slot ``a``; each product class
    is a tuple of factor class labels, one per factor. Entry ``(i, j, k)`` is
    the product over factors of the factor integral of the three labels.
    """
    if len(classes) != 3:
        raise InputError("three slots of product classes required")
    nf = len(factors)
    for slot in classes:
        for cls in slot:
            if len(cls) != nf:
                raise InputError(f"product class {cls} does not have {nf} factor labels")
            for f, lab in zip(factors, cls):
                f.index(lab)
    shape = tuple(len(s) for s in classes)
    T = np.zeros(shape, dtype=np.uint8)
    for idx in itertools.product(*(range(d) for d in shape)):
        trip = [classes[a][i] for a, i in enumerate(idx)]
        vals = [factors[f].integral(trip[0][f], trip[1][f], trip[2][f]) for f in range(nf)]
        if 0 in vals:
            continue
        if -1 in vals:
            raise UnsupportedGradeError(f"factor integral for {trip} is not determined by pairings")
        T[idx] = 1
    labels = tuple(tuple("(" + ",".join(cls) + ")" for cls in slot) for slot in classes)
    return LogicalActionTensor(T, labels)


# ---------------------------------------------------------------------------
# text formats


def format_rule(rule: CupRule) -> str:
    out = []
    for (p, q) in rule.table:
        out.append(f"rule {p} {q}")
        for c, terms in enumerate(rule.terms(p, q)):
            body = " ".join(f"({a},{b})" for a, b in terms)
            out.append(f"cell {c}: {body}".rstrip())
    return "\n".join(out) + "\n"


def parse_rule(text: str, domain: ChainComplex) -> CupRule:
    lists: dict[tuple[int, int], list[list[tuple[int, int]]]] = {}
    key = None
    for lineno, line in enumerate(text.split("\n"), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("rule"):
            parts = line.split()
            if len(parts) != 3:
                raise InputError(f"line {lineno}: bad rule header")
            key = (int(parts[1]), int(parts[2]))
            if key in lists:
                raise InputError(f"line {lineno}: duplicate rule {key}")
            lists[key] = [[] for _ in range(domain.n(key[0] + key[1]))]
            continue
        if key is None or not line.startswith("cell"):
            raise InputError(f"line {lineno}: expected 'cell <id>: ...'")
        head, _, body = line.partition(":")
        try:
            cell = int(head.split()[1])
            terms = []
            for tok in body.split():
                a, b = tok.strip("()").split(",")
                terms.append((int(a), int(b)))
        except (ValueError, IndexError) as exc:
            raise InputError(f"line {lineno}: malformed cell entry") from exc
        if not 0 <= cell < len(lists[key]):
            raise InputError(f"line {lineno}: target cell {cell} out of range")
        lists[key][cell].extend(terms)
    return CupRule.from_lists(domain, lists)


def format_cochains(cochains: Sequence[Cochain]) -> str:
    out = []
    for c in cochains:
        out.append(f"cochain {c.grade} {c.length}")
        out.append(" ".join(str(i) for i in c.values.support))
    return "\n".join(out) + "\n"


def parse_cochains(text: str) -> list[Cochain]:
    lines = text.split("\n")
    out = []
    i = 0
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        parts = lines[i].split()
        if len(parts) != 3 or parts[0] != "cochain":
            raise InputError(f"line {i + 1}: expected 'cochain <grade> <length>'")
        grade, length = int(parts[1]), int(parts[2])
        body = lines[i + 1] if i + 1 < len(lines) else ""
        try:
            sup = tuple(int(t) for t in body.split())
        except ValueError as exc:
            raise InputError(f"line {i + 2}: bad support list") from exc
        out.append(Cochain(grade, BitVector(length, sup)))
        i += 2
    return out
