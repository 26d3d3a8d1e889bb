"""Chain complexes over GF(2), their (co)homology, and CSS extraction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import InputError, InvariantError
from .gf2 import (
    BitMatrix,
    BitVector,
    dense_to_vectors,
    inverse,
    kernel_matrix,
    parse_bmx_lines,
    format_bmx,
    quotient_indices,
    rank,
    vectors_to_dense,
)

__all__ = [
    "ChainComplex",
    "HomologyBasis",
    "CSSCode",
    "ValidationReport",
    "validate",
    "homology_basis",
    "cohomology_basis",
    "betti_numbers",
    "css_extract",
    "pairing_matrix",
    "dual_pair_bases",
    "direct_sum",
    "format_chc",
    "parse_chc",
    "read_chc",
    "write_chc",
]


@dataclass(frozen=True, eq=False)
class ChainComplex:
    """Graded GF(2) chain complex with boundary maps ``grade k -> grade k-1``.

    ``boundary[k]`` is stored for ``k = 1..r``. Use :meth:`d` for any integer
    grade; maps that leave the range ``0..r`` are zero.
    """

    cells: tuple[int, ...]
    boundary: Mapping[int, BitMatrix]
    labels: tuple[tuple[str, ...], ...] | None = None
    faces: Mapping[int, np.ndarray] | None = None

    def __post_init__(self) -> None:
        cells = tuple(int(c) for c in self.cells)
        if not cells or min(cells) < 0:
            raise InputError("cell counts must be a non-empty list of non-negative integers")
        object.__setattr__(self, "cells", cells)
        r = len(cells) - 1
        bd = {}
        for k in range(1, r + 1):
            M = self.boundary.get(k)
            if M is None:
                M = BitMatrix.zeros(cells[k - 1], cells[k])
            if M.shape != (cells[k - 1], cells[k]):
                raise InputError(f"boundary {k} has shape {M.shape}, expected {(cells[k - 1], cells[k])}")
            bd[k] = M
        extra = set(self.boundary) - set(bd)
        if extra:
            raise InputError(f"boundary maps outside 1..{r}: {sorted(extra)}")
        object.__setattr__(self, "boundary", bd)
        if self.labels is not None:
            labels = tuple(tuple(str(s) for s in grade) for grade in self.labels)
            if len(labels) != r + 1:
                raise InputError("labels must be given for every grade")
            for k, grade in enumerate(labels):
                if len(grade) != cells[k]:
                    raise InputError(f"grade {k} has {len(grade)} labels for {cells[k]} cells")
                if len(set(grade)) != len(grade):
                    raise InputError(f"duplicate labels at grade {k}")
                if any("\n" in s for s in grade):
                    raise InputError("labels may not contain newlines")
            object.__setattr__(self, "labels", labels)

    @property
    def top_grade(self) -> int:
        return len(self.cells) - 1

    def n(self, k: int) -> int:
        """Cell count at grade ``k`` (zero outside ``0..r``)."""
        return self.cells[k] if 0 <= k <= self.top_grade else 0

    def d(self, k: int) -> BitMatrix:
        """Boundary ``grade k -> grade k-1``, zero when out of range."""
        if 1 <= k <= self.top_grade:
            return self.boundary[k]
        return BitMatrix.zeros(self.n(k - 1), self.n(k))

    def coboundary(self, k: int) -> BitMatrix:
        """Coboundary ``grade k -> grade k+1`` (transpose of ``d(k+1)``)."""
        return self.d(k + 1).T

    def label(self, k: int, i: int) -> str:
        if self.labels is None:
            return f"{k}:{i}"
        return self.labels[k][i]

    def grade_labels(self, k: int) -> tuple[str, ...]:
        if self.labels is None:
            return tuple(f"{k}:{i}" for i in range(self.n(k)))
        return self.labels[k]

    def check_grade(self, k: int) -> None:
        if not 0 <= k <= self.top_grade:
            raise InputError(f"grade {k} outside 0..{self.top_grade}")

    def with_labels(self, labels) -> "ChainComplex":
        return ChainComplex(self.cells, self.boundary, labels, self.faces)

    def same_structure(self, other: "ChainComplex") -> bool:
        return self.cells == other.cells and all(
            self.boundary[k] == other.boundary[k] for k in self.boundary
        )


@dataclass(frozen=True)
class HomologyBasis:
    """Representatives of a basis of H_k (or H^k when ``cohomology`` is set)."""

    grade: int
    representatives: tuple[BitVector, ...]
    cohomology: bool = False
    class_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "representatives", tuple(self.representatives))
        if self.class_labels is not None:
            labs = tuple(self.class_labels)
            if len(labs) != len(self.representatives):
                raise InputError("one class label per representative required")
            object.__setattr__(self, "class_labels", labs)

    @property
    def betti(self) -> int:
        return len(self.representatives)

    def labels(self) -> tuple[str, ...]:
        if self.class_labels is not None:
            return self.class_labels
        tag = "u" if self.cohomology else "h"
        return tuple(f"{tag}{self.grade}_{i}" for i in range(self.betti))

    def dense(self, length: int) -> np.ndarray:
        return vectors_to_dense(list(self.representatives), length)

    def __len__(self) -> int:
        return self.betti


@dataclass(frozen=True, eq=False)
class CSSCode:
    """CSS code read off a chain complex at ``qubit_grade``."""

    H_X: BitMatrix
    H_Z: BitMatrix
    qubit_grade: int = 1
    source_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.H_X.cols != self.H_Z.cols:
            raise InputError("H_X and H_Z act on different qubit counts")
        if not (self.H_X @ self.H_Z.T).is_zero():
            raise InvariantError("H_X H_Z^T != 0")

    @property
    def n_qubits(self) -> int:
        return self.H_X.cols

    @property
    def k(self) -> int:
        return self.n_qubits - rank(self.H_X) - rank(self.H_Z)


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    grade: int | None = None
    cell: int | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.passed


def validate(X: ChainComplex) -> ValidationReport:
    """Check shapes and ``d(k) d(k+1) = 0`` at every grade."""
    for k in range(1, X.top_grade + 1):
        if X.d(k).shape != (X.n(k - 1), X.n(k)):
            return ValidationReport(False, k, None, f"boundary {k} has wrong shape")
    for k in range(1, X.top_grade):
        comp = X.d(k) @ X.d(k + 1)
        if not comp.is_zero():
            col = int(np.flatnonzero(comp.col_weights())[0])
            return ValidationReport(False, k + 1, col, f"d{k} d{k + 1} != 0 on cell {col} of grade {k + 1}")
    return ValidationReport(True, message="ok")


def _homology_dense(Dk: BitMatrix, Dk1: BitMatrix) -> np.ndarray:
    """Representatives of ker Dk / im Dk1 as dense rows."""
    n = Dk.cols
    Z = kernel_matrix(Dk.to_dense()) if n else np.zeros((0, 0), dtype=np.uint8)
    if Z.shape[0] == 0:
        return np.zeros((0, n), dtype=np.uint8)
    B = Dk1.T.to_dense()
    B = B[B.any(axis=1)]
    idx = quotient_indices(Z, B)
    return Z[idx]


def homology_basis(X: ChainComplex, k: int) -> HomologyBasis:
    """Deterministic representatives of H_k."""
    X.check_grade(k)
    reps = _homology_dense(X.d(k), X.d(k + 1))
    return HomologyBasis(k, tuple(dense_to_vectors(reps)) if reps.shape[0] else ())


def cohomology_basis(X: ChainComplex, k: int) -> HomologyBasis:
    """Deterministic cocycle representatives of H^k."""
    X.check_grade(k)
    reps = _homology_dense(X.d(k + 1).T, X.d(k).T)
    return HomologyBasis(k, tuple(dense_to_vectors(reps)) if reps.shape[0] else (), cohomology=True)


def betti_numbers(X: ChainComplex) -> tuple[int, ...]:
    """Betti numbers from ranks alone (no representatives)."""
    ranks = [0] + [rank(X.d(k)) for k in range(1, X.top_grade + 1)] + [0]
    return tuple(X.n(k) - ranks[k] - ranks[k + 1] for k in range(X.top_grade + 1))


def css_extract(X: ChainComplex, q: int) -> CSSCode:
    """``H_X = d(q)``, ``H_Z = d(q+1)^T`` with qubits on grade ``q``."""
    X.check_grade(q)
    labels = X.labels[q] if X.labels is not None else None
    return CSSCode(X.d(q), X.d(q + 1).T, q, labels)


def is_cycle(X: ChainComplex, k: int, v: BitVector) -> bool:
    return X.d(k).apply(v.to_dense()).sum() == 0 if v.length else True


def is_cocycle(X: ChainComplex, k: int, v: BitVector) -> bool:
    return X.d(k + 1).T.apply(v.to_dense()).sum() == 0 if v.length else True


def pairing_matrix(A: HomologyBasis, B: HomologyBasis, X: ChainComplex) -> BitMatrix:
    """Matrix of overlaps ``<A_i, B_j>`` between cycles and cocycles."""
    if A.grade != B.grade:
        raise InputError(f"grade mismatch: {A.grade} vs {B.grade}")
    k = A.grade
    X.check_grade(k)
    n = X.n(k)
    for v in A.representatives:
        if v.length != n or not is_cycle(X, k, v):
            raise InputError("left basis contains a non-cycle")
    for v in B.representatives:
        if v.length != n or not is_cocycle(X, k, v):
            raise InputError("right basis contains a non-cocycle")
    if not A.betti or not B.betti:
        return BitMatrix.zeros(A.betti, B.betti)
    P = A.dense(n).astype(np.int64) @ B.dense(n).astype(np.int64).T
    return BitMatrix.from_dense(P & 1)


def dual_pair_bases(hom: HomologyBasis, cohom: HomologyBasis, X: ChainComplex) -> tuple[HomologyBasis, HomologyBasis]:
    """Re-choose the cohomology basis so the pairing becomes the identity."""
    if hom.betti != cohom.betti:
        raise InvariantError(f"betti mismatch {hom.betti} vs {cohom.betti}")
    if hom.betti == 0:
        return hom, cohom
    P = pairing_matrix(hom, cohom, X)
    try:
        Pinv = inverse(P)
    except InvariantError as exc:
        raise InvariantError(f"singular pairing at grade {hom.grade}") from exc
    n = X.n(hom.grade)
    # new_j = sum_l Pinv[l, j] b_l
    new = (Pinv.T.to_dense().astype(np.int64) @ cohom.dense(n).astype(np.int64)) & 1
    return hom, HomologyBasis(cohom.grade, tuple(dense_to_vectors(new.astype(np.uint8))), True, cohom.class_labels)


def direct_sum(X: ChainComplex, Y: ChainComplex) -> ChainComplex:
    """Disjoint union; cells of ``X`` precede those of ``Y`` at every grade."""
    r = max(X.top_grade, Y.top_grade)
    cells = tuple(X.n(k) + Y.n(k) for k in range(r + 1))
    bd = {}
    for k in range(1, r + 1):
        a, b = X.d(k), Y.d(k)
        top = BitMatrix.hstack([a, BitMatrix.zeros(a.rows, b.cols)])
        bot = BitMatrix.hstack([BitMatrix.zeros(b.rows, a.cols), b])
        bd[k] = BitMatrix.vstack([top, bot])
    labels = None
    if X.labels is not None or Y.labels is not None:
        labels = tuple(
            tuple(f"L.{s}" for s in (X.grade_labels(k) if k <= X.top_grade else ()))
            + tuple(f"R.{s}" for s in (Y.grade_labels(k) if k <= Y.top_grade else ()))
            for k in range(r + 1)
        )
    return ChainComplex(cells, bd, labels)


# ---------------------------------------------------------------------------
# chc text format


def format_chc(X: ChainComplex) -> str:
    out = [f"chc {X.top_grade}"]
    out += [f"cells {k} {c}" for k, c in enumerate(X.cells)]
    for k in range(1, X.top_grade + 1):
        out.append(f"boundary {k}")
        out.append(format_bmx(X.d(k))[:-1])
    if X.labels is not None:
        for k in range(X.top_grade + 1):
            out.append(f"labels {k}")
            out.extend(X.labels[k])
    if X.faces is not None:
        for k in sorted(X.faces):
            out.append(f"faces {k}")
            out.extend(" ".join(str(int(v)) for v in row) for row in X.faces[k])
    return "\n".join(out) + "\n"


def parse_chc(text: str) -> ChainComplex:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise InputError("empty chc input")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "chc":
        raise InputError(f"bad chc header: {lines[0]!r}")
    try:
        r = int(head[1])
    except ValueError as exc:
        raise InputError("bad chc header") from exc
    i = 1
    cells = []
    for k in range(r + 1):
        parts = lines[i].split() if i < len(lines) else []
        if len(parts) != 3 or parts[0] != "cells" or parts[1] != str(k):
            raise InputError(f"expected 'cells {k} <count>' at line {i + 1}")
        cells.append(int(parts[2]))
        i += 1
    bd = {}
    for k in range(1, r + 1):
        if i >= len(lines) or lines[i].strip() != f"boundary {k}":
            raise InputError(f"expected 'boundary {k}' at line {i + 1}")
        bd[k], i = parse_bmx_lines(lines, i + 1)
    labels: list[tuple[str, ...]] | None = None
    faces: dict[int, np.ndarray] = {}
    while i < len(lines):
        parts = lines[i].split()
        if len(parts) == 2 and parts[0] == "labels":
            k = int(parts[1])
            if labels is None:
                labels = [()] * (r + 1)
            if not 0 <= k <= r or i + 1 + cells[k] > len(lines):
                raise InputError(f"bad labels section for grade {k}")
            labels[k] = tuple(lines[i + 1 : i + 1 + cells[k]])
            i += 1 + cells[k]
        elif len(parts) == 2 and parts[0] == "faces":
            k = int(parts[1])
            if not 1 <= k <= r or i + 1 + cells[k] > len(lines):
                raise InputError(f"bad faces section for grade {k}")
            rows = [[int(t) for t in lines[i + 1 + j].split()] for j in range(cells[k])]
            faces[k] = np.asarray(rows, dtype=np.int64).reshape(cells[k], k + 1)
            i += 1 + cells[k]
        elif not lines[i].strip():
            i += 1
        else:
            raise InputError(f"unexpected chc content at line {i + 1}: {lines[i]!r}")
    return ChainComplex(tuple(cells), bd, tuple(labels) if labels is not None else None, faces or None)


def read_chc(path) -> ChainComplex:
    with open(path, encoding="utf-8") as fh:
        return parse_chc(fh.read())


def write_chc(X: ChainComplex, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_chc(X))
