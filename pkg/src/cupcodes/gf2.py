"""Exact linear algebra over GF(2).

Matrices are stored sparsely (row-compressed index arrays) and converted to
bit-packed ``uint64`` rows for elimination. Pivoting always takes the lowest
available column first, so every basis returned here is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import InputError, InvariantError

__all__ = [
    "BitMatrix",
    "BitVector",
    "rank",
    "kernel_basis",
    "solve",
    "quotient_basis",
    "inverse",
    "independent_rows",
    "format_bmx",
    "parse_bmx",
    "read_bmx",
    "write_bmx",
]


# ---------------------------------------------------------------------------
# bit packing helpers


def pack_rows(dense: np.ndarray) -> np.ndarray:
    """Pack an ``(m, n)`` 0/1 array into ``(m, ceil(n/64))`` little-endian words."""
    dense = np.asarray(dense, dtype=np.uint8)
    m, n = dense.shape
    words = max(1, -(-n // 64))
    padded = np.zeros((m, words * 64), dtype=np.uint8)
    padded[:, :n] = dense & 1
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").copy()


def unpack_rows(packed: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`pack_rows`."""
    packed = np.ascontiguousarray(packed, dtype="<u8")
    bits = np.unpackbits(packed.view(np.uint8), axis=1, bitorder="little")
    return bits[:, :n].astype(np.uint8)


def popcount_rows(packed: np.ndarray) -> np.ndarray:
    """Hamming weight of each packed row."""
    return np.bitwise_count(packed).sum(axis=1, dtype=np.int64)


def _rref_inplace(A: np.ndarray, col_limit: int) -> list[int]:
    """Reduce packed rows ``A`` to RREF over the first ``col_limit`` columns.

    Rows are permuted in place so that pivot ``i`` lives in row ``i``.
    Returns the pivot columns in increasing order.
    """
    m = A.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(col_limit):
        if r == m:
            break
        w, b = divmod(c, 64)
        bit = np.uint64(1) << np.uint64(b)
        hits = np.flatnonzero(A[r:, w] & bit)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        mask = (A[:, w] & bit) != 0
        mask[r] = False
        if mask.any():
            A[mask, w:] ^= A[r, w:]
        pivots.append(c)
        r += 1
    return pivots


# ---------------------------------------------------------------------------
# vectors


@dataclass(frozen=True)
class BitVector:
    """A GF(2) vector given by its length and sorted support."""

    length: int
    support: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        sup = tuple(int(i) for i in self.support)
        for a, b in zip(sup, sup[1:]):
            if a >= b:
                raise InputError("BitVector support must be strictly increasing")
        if sup and (sup[0] < 0 or sup[-1] >= self.length):
            raise InputError("BitVector support index out of range")
        object.__setattr__(self, "support", sup)

    @classmethod
    def from_dense(cls, bits: Iterable[int]) -> "BitVector":
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
        arr = arr.astype(np.int64) & 1
        return cls(int(arr.shape[0]), tuple(int(i) for i in np.flatnonzero(arr)))

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, ())

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.length, dtype=np.uint8)
        if self.support:
            out[list(self.support)] = 1
        return out

    @property
    def weight(self) -> int:
        return len(self.support)

    def is_zero(self) -> bool:
        return not self.support

    def __add__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise InputError("BitVector length mismatch")
        return BitVector(self.length, tuple(sorted(set(self.support) ^ set(other.support))))

    def dot(self, other: "BitVector") -> int:
        """Parity of the support overlap."""
        if self.length != other.length:
            raise InputError("BitVector length mismatch")
        return len(set(self.support) & set(other.support)) & 1

    def __repr__(self) -> str:
        return f"BitVector({self.length}, {list(self.support)})"


def vectors_to_dense(vectors: Sequence[BitVector], length: int | None = None) -> np.ndarray:
    """Stack vectors as rows of a dense 0/1 array."""
    if length is None:
        if not vectors:
            raise InputError("cannot infer length of an empty vector list")
        length = vectors[0].length
    out = np.zeros((len(vectors), length), dtype=np.uint8)
    for i, v in enumerate(vectors):
        if v.length != length:
            raise InputError("vector length mismatch")
        if v.support:
            out[i, list(v.support)] = 1
    return out


def dense_to_vectors(rows: np.ndarray) -> list[BitVector]:
    rows = np.asarray(rows)
    n = rows.shape[1]
    return [BitVector(n, tuple(int(i) for i in np.flatnonzero(r & 1))) for r in rows]


# ---------------------------------------------------------------------------
# matrices


class BitMatrix:
    """Immutable sparse matrix over GF(2).

    Entries are held as row-compressed index arrays. Iteration order is
    row-major with ascending columns.
    """

    __slots__ = ("rows", "cols", "_indptr", "_indices", "_hash")

    def __init__(self, rows: int, cols: int, entries: Iterable[tuple[int, int]] = ()):
        rows, cols = int(rows), int(cols)
        if rows < 0 or cols < 0:
            raise InputError("matrix shape must be non-negative")
        pairs = sorted((int(r), int(c)) for r, c in entries)
        for a, b in zip(pairs, pairs[1:]):
            if a == b:
                raise InputError(f"duplicate entry {a}")
        if pairs:
            arr = np.asarray(pairs, dtype=np.int64)
            if arr.min() < 0 or arr[:, 0].max() >= rows or arr[:, 1].max() >= cols:
                raise InputError("entry index out of range")
            r_idx, c_idx = arr[:, 0], arr[:, 1]
        else:
            r_idx = c_idx = np.zeros(0, dtype=np.int64)
        indptr = np.zeros(rows + 1, dtype=np.int64)
        np.add.at(indptr, r_idx + 1, 1)
        self._init(rows, cols, np.cumsum(indptr), c_idx)

    def _init(self, rows: int, cols: int, indptr: np.ndarray, indices: np.ndarray) -> None:
        self.rows = rows
        self.cols = cols
        self._indptr = np.asarray(indptr, dtype=np.int64)
        self._indices = np.asarray(indices, dtype=np.int64)
        self._indptr.setflags(write=False)
        self._indices.setflags(write=False)
        self._hash = None

    @classmethod
    def _from_csr(cls, m: sp.csr_matrix) -> "BitMatrix":
        m = sp.csr_matrix(m)
        m.data = np.asarray(m.data, dtype=np.int64) % 2
        m.eliminate_zeros()
        m.sort_indices()
        obj = cls.__new__(cls)
        obj._init(m.shape[0], m.shape[1], m.indptr.copy(), m.indices.copy())
        return obj

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        arr = np.asarray(dense, dtype=np.int64)
        if arr.ndim != 2:
            raise InputError("dense matrix must be 2-dimensional")
        return cls._from_csr(sp.csr_matrix(arr & 1))

    @classmethod
    def from_row_supports(cls, supports: Sequence[Iterable[int]], cols: int) -> "BitMatrix":
        return cls(len(supports), cols, ((r, c) for r, sup in enumerate(supports) for c in sup))

    @classmethod
    def from_columns(cls, vectors: Sequence[BitVector], rows: int) -> "BitMatrix":
        """Matrix whose columns are the given vectors."""
        return cls(rows, len(vectors), ((r, j) for j, v in enumerate(vectors) for r in v.support))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, ((i, i) for i in range(n)))

    # -- views --------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return int(self._indices.size)

    def to_csr(self) -> sp.csr_matrix:
        data = np.ones(self._indices.size, dtype=np.int64)
        return sp.csr_matrix((data, self._indices, self._indptr), shape=self.shape)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        if self.nnz:
            out[np.repeat(np.arange(self.rows), np.diff(self._indptr)), self._indices] = 1
        return out

    def packed(self) -> np.ndarray:
        return pack_rows(self.to_dense())

    def row_support(self, i: int) -> tuple[int, ...]:
        lo, hi = self._indptr[i], self._indptr[i + 1]
        return tuple(int(c) for c in self._indices[lo:hi])

    def row_vector(self, i: int) -> BitVector:
        return BitVector(self.cols, self.row_support(i))

    def entries(self) -> Iterator[tuple[int, int]]:
        for i in range(self.rows):
            for c in self._indices[self._indptr[i] : self._indptr[i + 1]]:
                yield (i, int(c))

    def row_weights(self) -> np.ndarray:
        return np.diff(self._indptr)

    def col_weights(self) -> np.ndarray:
        return np.bincount(self._indices, minlength=self.cols)

    def is_zero(self) -> bool:
        return self.nnz == 0

    def __getitem__(self, key: tuple[int, int]) -> int:
        r, c = key
        lo, hi = self._indptr[r], self._indptr[r + 1]
        pos = np.searchsorted(self._indices[lo:hi], c)
        return int(pos < hi - lo and self._indices[lo + pos] == c)

    # -- algebra ------------------------------------------------------------

    @property
    def T(self) -> "BitMatrix":
        return BitMatrix._from_csr(self.to_csr().T.tocsr())

    def transpose(self) -> "BitMatrix":
        return self.T

    def __matmul__(self, other):
        if isinstance(other, BitMatrix):
            if self.cols != other.rows:
                raise InputError(f"shape mismatch {self.shape} @ {other.shape}")
            return BitMatrix._from_csr(self.to_csr() @ other.to_csr())
        if isinstance(other, BitVector):
            if other.length != self.cols:
                raise InputError("vector length mismatch")
            return BitVector.from_dense(self.apply(other.to_dense()))
        return NotImplemented

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Dense product ``M @ x mod 2``; ``x`` may be a vector or a column block."""
        x = np.asarray(x, dtype=np.int64)
        return (self.to_csr() @ x % 2).astype(np.uint8)

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise InputError("shape mismatch in addition")
        return BitMatrix._from_csr(self.to_csr() + other.to_csr())

    def kron(self, other: "BitMatrix") -> "BitMatrix":
        return BitMatrix._from_csr(sp.kron(self.to_csr(), other.to_csr(), format="csr"))

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> "BitMatrix":
        m = self.to_csr()
        if rows is not None:
            m = m[np.asarray(rows, dtype=np.int64), :]
        if cols is not None:
            m = m[:, np.asarray(cols, dtype=np.int64)]
        return BitMatrix._from_csr(m)

    @staticmethod
    def hstack(blocks: Sequence["BitMatrix"]) -> "BitMatrix":
        return BitMatrix._from_csr(sp.hstack([b.to_csr() for b in blocks], format="csr"))

    @staticmethod
    def vstack(blocks: Sequence["BitMatrix"]) -> "BitMatrix":
        return BitMatrix._from_csr(sp.vstack([b.to_csr() for b in blocks], format="csr"))

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self._indptr, other._indptr)
            and np.array_equal(self._indices, other._indices)
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.shape, self._indptr.tobytes(), self._indices.tobytes()))
        return self._hash

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


# ---------------------------------------------------------------------------
# elimination-based operations


def _as_dense(M) -> np.ndarray:
    if isinstance(M, BitMatrix):
        return M.to_dense()
    return np.asarray(M, dtype=np.uint8) & 1


def rank(M) -> int:
    """Rank over GF(2)."""
    dense = _as_dense(M)
    if dense.size == 0:
        return 0
    A = pack_rows(dense)
    return len(_rref_inplace(A, dense.shape[1]))


def rref(M) -> tuple[np.ndarray, list[int]]:
    """Dense reduced row echelon form and pivot columns."""
    dense = _as_dense(M)
    m, n = dense.shape
    if m == 0 or n == 0:
        return np.zeros((0, n), dtype=np.uint8), []
    A = pack_rows(dense)
    piv = _rref_inplace(A, n)
    return unpack_rows(A[: len(piv)], n), piv


def kernel_matrix(M) -> np.ndarray:
    """Kernel basis as rows of a dense array, one row per free column."""
    dense = _as_dense(M)
    m, n = dense.shape
    R, piv = rref(dense)
    free = [c for c in range(n) if c not in set(piv)]
    K = np.zeros((len(free), n), dtype=np.uint8)
    if not free:
        return K
    free_arr = np.asarray(free)
    K[np.arange(len(free)), free_arr] = 1
    if piv:
        # x[piv_i] = R[i, f] for the free column f set to one
        K[:, np.asarray(piv)] = R[:, free_arr].T
    return K


def kernel_basis(M) -> list[BitVector]:
    """Basis of ``{v : M v = 0}``; one vector per non-pivot column."""
    dense = _as_dense(M)
    return dense_to_vectors(kernel_matrix(dense)) if dense.shape[1] else []


def solve(M, b: BitVector) -> BitVector | None:
    """Return some ``x`` with ``M x = b``, or ``None`` when inconsistent."""
    dense = _as_dense(M)
    m, n = dense.shape
    if b.length != m:
        raise InputError(f"right-hand side has length {b.length}, expected {m}")
    aug = np.zeros((m, n + 1), dtype=np.uint8)
    aug[:, :n] = dense
    aug[:, n] = b.to_dense()
    if m == 0:
        return BitVector.zeros(n)
    A = pack_rows(aug)
    piv = _rref_inplace(A, n)
    R = unpack_rows(A, n + 1)
    if R[len(piv) :, n].any():
        return None
    x = np.zeros(n, dtype=np.uint8)
    if piv:
        x[np.asarray(piv)] = R[: len(piv), n]
    return BitVector.from_dense(x)


def independent_rows(dense: np.ndarray) -> list[int]:
    """Indices of the greedy (first-come) maximal independent subset of rows."""
    dense = np.asarray(dense, dtype=np.uint8)
    if dense.shape[0] == 0 or dense.shape[1] == 0:
        return []
    A = pack_rows(np.ascontiguousarray(dense.T))
    return _rref_inplace(A, dense.shape[0])


def quotient_basis(cycles: Sequence[BitVector], boundaries: Sequence[BitVector]) -> list[BitVector]:
    """Representatives of a basis of span(cycles) / span(boundaries)."""
    if not cycles:
        if any(not b.is_zero() for b in boundaries):
            raise InvariantError("boundaries are not contained in the cycle span")
        return []
    n = cycles[0].length
    Z = vectors_to_dense(cycles, n)
    B = vectors_to_dense(boundaries, n) if boundaries else np.zeros((0, n), dtype=np.uint8)
    reps = quotient_indices(Z, B)
    return [cycles[i] for i in reps]


def quotient_indices(Z: np.ndarray, B: np.ndarray) -> list[int]:
    """Row indices of ``Z`` whose classes form a basis of span(Z)/span(B)."""
    nb = B.shape[0]
    stacked = np.vstack([B, Z]) if nb else Z
    chosen = independent_rows(stacked)
    rank_zb = len(chosen)
    if rank(Z) != rank_zb:
        raise InvariantError("boundaries are not contained in the cycle span")
    return [i - nb for i in chosen if i >= nb]


def inverse(M) -> BitMatrix:
    """Inverse of a square invertible matrix; raises on singular input."""
    dense = _as_dense(M)
    n, n2 = dense.shape
    if n != n2:
        raise InputError("inverse requires a square matrix")
    if n == 0:
        return BitMatrix.zeros(0, 0)
    aug = np.hstack([dense, np.eye(n, dtype=np.uint8)])
    A = pack_rows(aug)
    piv = _rref_inplace(A, n)
    if len(piv) != n:
        raise InvariantError("matrix is singular over GF(2)")
    return BitMatrix.from_dense(unpack_rows(A, 2 * n)[:, n:])


# ---------------------------------------------------------------------------
# bmx text format


def format_bmx(M: BitMatrix) -> str:
    lines = [f"bmx {M.rows} {M.cols}"]
    for i in range(M.rows):
        lines.append(" ".join(str(c) for c in M.row_support(i)))
    return "\n".join(lines) + "\n"


def parse_bmx_lines(lines: Sequence[str], start: int = 0) -> tuple[BitMatrix, int]:
    """Parse a bmx block beginning at ``lines[start]``; return matrix and next index."""
    if start >= len(lines):
        raise InputError("missing bmx header")
    head = lines[start].split()
    if len(head) != 3 or head[0] != "bmx":
        raise InputError(f"bad bmx header: {lines[start]!r}")
    try:
        rows, cols = int(head[1]), int(head[2])
    except ValueError as exc:
        raise InputError(f"bad bmx header: {lines[start]!r}") from exc
    if start + 1 + rows > len(lines):
        raise InputError("bmx payload truncated")
    supports = []
    for i in range(rows):
        text = lines[start + 1 + i].strip()
        try:
            sup = [int(t) for t in text.split()] if text else []
        except ValueError as exc:
            raise InputError(f"bad bmx row {i}: {text!r}") from exc
        if sorted(set(sup)) != sup:
            raise InputError(f"bmx row {i} is not strictly ascending")
        supports.append(sup)
    return BitMatrix.from_row_supports(supports, cols), start + 1 + rows


def parse_bmx(text: str) -> BitMatrix:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    M, end = parse_bmx_lines(lines)
    if any(l.strip() for l in lines[end:]):
        raise InputError("trailing content after bmx payload")
    return M


def read_bmx(path) -> BitMatrix:
    with open(path, encoding="utf-8") as fh:
        return parse_bmx(fh.read())


def write_bmx(M: BitMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_bmx(M))
