"""Cellular chain complexes of classical and quantum codes, doubled by a mirror.

The classical double of a symmetric check matrix ``Hbar`` (m checks, n bits)
has, for ``k <= 3``::

    grade 0: m check vertices p_j
    grade 1: one path edge per consecutive pair of checks on each bit
    grade 2: m check 2-cells, attached trivially (d2 = 0)
    grade 3: n bit 3-cells with d3 = Hbar

and grade ``r - k`` mirrors grade ``k`` with ``d_{r+1-k} = d_k^T``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complex import ChainComplex, betti_numbers, homology_basis, is_cocycle
from .constructors import TannerGraph, tanner_graph
from .errors import InputError, PreconditionError
from .gf2 import BitMatrix, rank

__all__ = ["CWDouble", "PoincareRow", "PoincareReport", "classical_cw_complex", "quantum_cw_complex", "poincare_report"]


@dataclass(frozen=True, eq=False)
class CWDouble:
    """A mirror-doubled cellular complex with role tags per cell."""

    complex: ChainComplex
    roles: tuple[tuple[str, ...], ...]
    tanner: TannerGraph | None
    kind: str

    @property
    def r(self) -> int:
        return self.complex.top_grade


def _mirror(lower: dict[int, BitMatrix], cells_low: list[int], r: int, low_top: int):
    """Assemble cells and boundaries from grades ``0..low_top`` and their mirror."""
    cells = [0] * (r + 1)
    for k in range(low_top + 1):
        cells[k] = cells_low[k]
        cells[r - k] = cells_low[k]
    bd: dict[int, BitMatrix] = {}
    for k in range(1, r + 1):
        if k <= low_top:
            bd[k] = lower.get(k, BitMatrix.zeros(cells[k - 1], cells[k]))
        elif k >= r + 1 - low_top:
            bd[k] = lower.get(r + 1 - k, BitMatrix.zeros(cells[r - k], cells[r + 1 - k])).T
        else:
            bd[k] = BitMatrix.zeros(cells[k - 1], cells[k])
    return cells, bd


def classical_cw_complex(Hbar: BitMatrix, r: int = 8) -> CWDouble:
    """Mirror-doubled CW complex of a classical code (checks are rows of ``Hbar``)."""
    if r < 7:
        raise InputError("classical double needs r >= 7 to separate the two halves")
    if Hbar.is_zero():
        raise PreconditionError("check matrix must be nonzero")
    tg = tanner_graph(Hbar)
    m, n = Hbar.rows, Hbar.cols
    edges: list[tuple[int, int, int]] = []
    for i, adj in enumerate(tg.adjacency):
        for a, b in zip(adj, adj[1:]):
            edges.append((i, a, b))
    d1 = BitMatrix(m, len(edges), [(a, e) for e, (_, a, _b) in enumerate(edges)] + [(b, e) for e, (_, _a, b) in enumerate(edges)])
    lower = {1: d1, 2: BitMatrix.zeros(len(edges), m), 3: Hbar}
    cells, bd = _mirror(lower, [m, len(edges), m, n], r, 3)

    low_labels = [
        [f"p{j}" for j in range(m)],
        [f"b{i}:p{a}-p{b}" for i, a, b in edges],
        [f"D{j}" for j in range(m)],
        [f"B{i}" for i in range(n)],
    ]
    low_roles = ["check-0cell", "bit-1cell", "check-2cell", "bit-3cell"]
    labels, roles = _mirror_labels(low_labels, low_roles, r)
    return CWDouble(ChainComplex(tuple(cells), bd, labels), roles, tg, "classical")


def quantum_cw_complex(H_X: BitMatrix, H_Z: BitMatrix, r: int = 11) -> CWDouble:
    """Minimal mirror double of a CSS code: X-checks, qubits, Z-checks at grades 3, 4, 5."""
    if r < 11:
        raise InputError("quantum double needs r >= 11")
    if H_X.cols != H_Z.cols:
        raise InputError("H_X and H_Z have different qubit counts")
    if not (H_X @ H_Z.T).is_zero():
        raise PreconditionError("CSS orthogonality H_X H_Z^T = 0 violated")
    mx, n, mz = H_X.rows, H_X.cols, H_Z.rows
    cells = [0] * (r + 1)
    for k, c in ((3, mx), (4, n), (5, mz)):
        cells[k] = c
        cells[r - k] = c
    bd = {k: BitMatrix.zeros(cells[k - 1], cells[k]) for k in range(1, r + 1)}
    bd[4] = H_X
    bd[5] = H_Z.T
    bd[r + 1 - 4] = H_X.T
    bd[r + 1 - 5] = H_Z
    low = {3: [f"X{j}" for j in range(mx)], 4: [f"Q{i}" for i in range(n)], 5: [f"Z{j}" for j in range(mz)]}
    low_roles = {3: "x-check-cell", 4: "qubit-cell", 5: "z-check-cell"}
    labels, roles = [], []
    for k in range(r + 1):
        if k in low:
            labels.append(tuple(low[k]))
            roles.append(tuple([low_roles[k]] * cells[k]))
        elif (r - k) in low:
            labels.append(tuple(f"*{s}" for s in low[r - k]))
            roles.append(tuple(["mirror-" + low_roles[r - k]] * cells[k]))
        else:
            labels.append(())
            roles.append(())
    X = ChainComplex(tuple(cells), bd, tuple(labels))
    return CWDouble(X, tuple(roles), None, "quantum")


def _mirror_labels(low_labels, low_roles, r):
    labels, roles = [], []
    top = len(low_labels) - 1
    for k in range(r + 1):
        if k <= top:
            labels.append(tuple(low_labels[k]))
            roles.append(tuple([low_roles[k]] * len(low_labels[k])))
        elif r - k <= top:
            labels.append(tuple(f"*{s}" for s in low_labels[r - k]))
            roles.append(tuple(["mirror-" + low_roles[r - k]] * len(low_labels[r - k])))
        else:
            labels.append(())
            roles.append(())
    return tuple(labels), tuple(roles)


@dataclass(frozen=True)
class PoincareRow:
    k: int
    betti: int
    betti_mirror: int
    mirror_maps_ok: bool
    pairing: str  # "invertible", "singular", "empty" or "n/a"

    @property
    def symmetric(self) -> bool:
        return self.betti == self.betti_mirror and self.mirror_maps_ok and self.pairing in ("invertible", "empty", "n/a")


@dataclass(frozen=True)
class PoincareReport:
    r: int
    rows: tuple[PoincareRow, ...]

    @property
    def symmetric(self) -> bool:
        return all(row.symmetric for row in self.rows)

    @property
    def flagged(self) -> tuple[int, ...]:
        return tuple(row.k for row in self.rows if not row.symmetric)

    def lines(self) -> list[str]:
        out = ["k betti betti_mirror mirror_maps pairing"]
        for row in self.rows:
            out.append(f"{row.k} {row.betti} {row.betti_mirror} {int(row.mirror_maps_ok)} {row.pairing}")
        out.append(f"poincare_symmetric={int(self.symmetric)}")
        return out


def poincare_report(X: CWDouble | ChainComplex) -> PoincareReport:
    """Compare H_k with the mirrored H_{r-k} at every grade.

    A grade-``(r-k)`` cycle, read through the index identification of mirrored
    cells, is a grade-``k`` cocycle; the pairing between the ``H_k`` basis and
    those mirrored classes must be invertible.
    """
    C = X.complex if isinstance(X, CWDouble) else X
    r = C.top_grade
    b = betti_numbers(C)
    rows = []
    for k in range(r + 1):
        mk = r - k
        same_cells = C.n(k) == C.n(mk)
        maps_ok = same_cells and C.n(k + 1) == C.n(mk - 1) and C.d(k + 1) == C.d(mk).T
        if C.n(k) == 0 and C.n(mk) == 0:
            pairing = "empty"
        elif not same_cells:
            pairing = "n/a"
        else:
            pairing = _pairing_status(C, k)
        rows.append(PoincareRow(k, b[k], b[mk], bool(maps_ok), pairing))
    return PoincareReport(r, tuple(rows))


def _pairing_status(C: ChainComplex, k: int) -> str:
    hom = homology_basis(C, k)
    mirrored = homology_basis(C, C.top_grade - k)
    if hom.betti != mirrored.betti:
        return "singular"
    if hom.betti == 0:
        return "empty"
    if not all(is_cocycle(C, k, v) for v in mirrored.representatives):
        return "singular"
    A = hom.dense(C.n(k)).astype(np.int64)
    B = mirrored.dense(C.n(k)).astype(np.int64)
    P = (A @ B.T) & 1
    return "invertible" if rank(P) == P.shape[0] else "singular"
