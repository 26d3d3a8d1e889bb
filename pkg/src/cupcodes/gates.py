"""Constant-depth CZ/CCZ circuits from cup products and their exact verification.

A diagonal circuit of CZ or CCZ gates across code copies implements the phase
polynomial ``f(x, y, z) = sum over gates of x[a] y[b] z[c]``. Because ``f`` is
multilinear, shifting one copy by an X-stabilizer changes ``f`` by a form of
degree at most two in the remaining copies, which is checked exactly on pairs of
kernel vectors instead of by simulation.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .complex import CSSCode, HomologyBasis
from .cup import Cochain, CupRule, Evaluator, SimplicialComplex, _domain, check_cycle
from .errors import InputError, PreconditionError
from .gf2 import BitMatrix, BitVector, kernel_matrix, vectors_to_dense
from .tensor import LogicalActionTensor

__all__ = [
    "PhaseCircuit",
    "LogicalActionTensor",
    "InteractionHypergraph",
    "Selection",
    "CodespaceReport",
    "StatevectorReport",
    "GadgetReport",
    "synthesize_circuit",
    "codespace_check",
    "logical_action",
    "build_interaction_hypergraph",
    "select_disjoint_triples",
    "statevector_check",
    "teleportation_gadget_check",
    "trivial_code",
    "format_circuit",
    "parse_circuit",
    "format_hypergraph",
    "parse_hypergraph",
    "format_selection",
    "parse_selection",
]

EXACT_LIMIT = 20


# ---------------------------------------------------------------------------
# circuits


@dataclass(frozen=True, eq=False)
class PhaseCircuit:
    """Canonical list of CZ (arity 2) or CCZ (arity 3) gates across copies.

    Gate ``(a, b[, c])`` acts on qubit ``a`` of copy 0, ``b`` of copy 1 and so on.
    Duplicate gates cancel in pairs; the stored list is sorted.
    """

    arity: int
    gates: np.ndarray
    copy_sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.arity not in (2, 3):
            raise InputError("arity must be 2 or 3")
        sizes = tuple(int(s) for s in self.copy_sizes)
        if len(sizes) != self.arity:
            raise InputError("one copy size per gate slot required")
        g = np.asarray(self.gates, dtype=np.int64).reshape(-1, self.arity)
        for a in range(self.arity):
            if g.size and (g[:, a].min() < 0 or g[:, a].max() >= sizes[a]):
                raise InputError(f"gate index out of range in copy {a}")
        if g.size:
            uniq, counts = np.unique(g, axis=0, return_counts=True)
            g = uniq[counts % 2 == 1]
        object.__setattr__(self, "gates", g)
        object.__setattr__(self, "copy_sizes", sizes)

    def __len__(self) -> int:
        return int(self.gates.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PhaseCircuit):
            return NotImplemented
        return (
            self.arity == other.arity
            and self.copy_sizes == other.copy_sizes
            and np.array_equal(self.gates, other.gates)
        )

    def max_qubit_load(self) -> int:
        """Largest number of gates acting on a single qubit (bounds the depth)."""
        if not len(self):
            return 0
        return int(max(np.bincount(self.gates[:, a]).max() for a in range(self.arity)))

    def without_gate(self, i: int) -> "PhaseCircuit":
        return PhaseCircuit(self.arity, np.delete(self.gates, i, axis=0), self.copy_sizes)


def synthesize_circuit(ev: Evaluator, grades: Sequence[int], sigma: BitVector) -> PhaseCircuit:
    """One gate per (cell of sigma, cup term), on qubits at the given grades."""
    grades = [int(g) for g in grades]
    if len(grades) not in (2, 3):
        raise InputError("two or three grades required")
    X = _domain(ev)
    n = sum(grades)
    if n > X.top_grade:
        raise InputError("grades exceed the top grade")
    check_cycle(X, sigma, n)
    cells = np.asarray(sigma.support, dtype=np.int64)
    sizes = tuple(X.n(g) for g in grades)
    if isinstance(ev, SimplicialComplex):
        cuts = np.cumsum([0] + grades)
        cols = [ev.sub_face(n, int(cuts[i]), int(cuts[i + 1]))[cells] for i in range(len(grades))]
        return PhaseCircuit(len(grades), np.stack(cols, axis=1) if cells.size else np.zeros((0, len(grades))), sizes)
    rule: CupRule = ev
    q1, q2 = grades[0], grades[1]
    t, a, b = _rule_terms(rule, q1, q2)
    if len(grades) == 2:
        keep = np.isin(t, cells)
        return PhaseCircuit(2, np.stack([a[keep], b[keep]], axis=1), sizes)
    q3 = grades[2]
    t3, u, c = _rule_terms(rule, q1 + q2, q3)
    keep = np.isin(t3, cells)
    by_target: dict[int, list[tuple[int, int]]] = {}
    for ti, ai, bi in zip(t.tolist(), a.tolist(), b.tolist()):
        by_target.setdefault(ti, []).append((ai, bi))
    gates = [(ai, bi, ci) for ui, ci in zip(u[keep].tolist(), c[keep].tolist()) for ai, bi in by_target.get(ui, ())]
    return PhaseCircuit(3, np.asarray(gates, dtype=np.int64).reshape(-1, 3), sizes)


def _rule_terms(rule: CupRule, p: int, q: int):
    from .errors import UnsupportedGradeError

    if not rule.covers(p, q):
        raise UnsupportedGradeError(f"rule has no entry for grades ({p},{q})")
    return rule.table[(p, q)]


# ---------------------------------------------------------------------------
# codespace verification


@dataclass(frozen=True)
class CodespaceReport:
    passed: bool
    generators_checked: int
    violations: tuple[tuple[int, int, tuple[int, ...]], ...] = ()

    def lines(self) -> list[str]:
        out = [f"codespace_preserved={int(self.passed)}", f"generators_checked={self.generators_checked}"]
        for copy, gen, wit in self.violations[:10]:
            out.append(f"violation copy={copy} generator={gen} witness={','.join(map(str, wit))}")
        return out


def trivial_code(n: int) -> CSSCode:
    """Unencoded qubits: no checks at all."""
    return CSSCode(BitMatrix.zeros(0, n), BitMatrix.zeros(0, n), 0)


def _check_codes(circuit: PhaseCircuit, codes: Sequence[CSSCode]) -> None:
    if len(codes) != circuit.arity:
        raise InputError("one code per copy required")
    for a, (code, n) in enumerate(zip(codes, circuit.copy_sizes)):
        if code.n_qubits != n:
            raise InputError(f"copy {a} has {n} qubits but its code has {code.n_qubits}")


def codespace_check(circuit: PhaseCircuit, codes: Sequence[CSSCode], threads: int = 1) -> CodespaceReport:
    """Check that every X-stabilizer generator commutes with the circuit on the code space."""
    _check_codes(circuit, codes)
    kers = [kernel_matrix(c.H_Z.to_dense()).astype(np.int64) for c in codes]
    G = circuit.gates
    jobs = [(c, gi) for c, code in enumerate(codes) for gi in range(code.H_X.rows)]
    HX = [c.H_X.to_dense() for c in codes]

    def run(job):
        c, gi = job
        s = HX[c][gi]
        sel = G[s[G[:, c]] == 1] if len(G) else G
        others = [o for o in range(circuit.arity) if o != c]
        if len(others) == 1:
            Y = kers[others[0]]
            v = Y[:, sel[:, others[0]]].sum(axis=1) & 1 if Y.size else np.zeros(0, np.int64)
            hits = np.flatnonzero(v)
            return (c, gi, (int(hits[0]),)) if hits.size else None
        Y, Z = kers[others[0]], kers[others[1]]
        if Y.shape[0] == 0 or Z.shape[0] == 0:
            return None
        M = (Y[:, sel[:, others[0]]] @ Z[:, sel[:, others[1]]].T) & 1
        hits = np.argwhere(M)
        return (c, gi, (int(hits[0][0]), int(hits[0][1]))) if hits.size else None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    bad = tuple(r for r in results if r is not None)
    return CodespaceReport(not bad, len(jobs), bad)


def _basis_matrix(basis, code: CSSCode) -> tuple[np.ndarray, tuple[str, ...]]:
    if isinstance(basis, HomologyBasis):
        vecs, labels = list(basis.representatives), basis.labels()
    else:
        vecs = [b.values if isinstance(b, Cochain) else b for b in basis]
        labels = None
    n = code.n_qubits
    A = vectors_to_dense(vecs, n) if vecs else np.zeros((0, n), np.uint8)
    if A.shape[0] and code.H_Z.rows and code.H_Z.apply(A.T).any():
        raise PreconditionError("logical basis vector is not a cocycle of its code")
    return A.astype(np.int64), labels


def logical_action(
    circuit: PhaseCircuit,
    codes: Sequence[CSSCode],
    logical_bases: Sequence,
    *,
    check: bool = True,
) -> LogicalActionTensor:
    """Parity of gates hitting each tuple of logical representatives."""
    _check_codes(circuit, codes)
    if len(logical_bases) != circuit.arity:
        raise InputError("one logical basis per copy required")
    if check:
        rep = codespace_check(circuit, codes)
        if not rep.passed:
            raise PreconditionError("circuit does not preserve the code space")
    mats, labels = [], []
    for a, (basis, code) in enumerate(zip(logical_bases, codes)):
        A, lab = _basis_matrix(basis, code)
        mats.append(A)
        labels.append(lab if lab is not None else tuple(f"{a}:{i}" for i in range(A.shape[0])))
    G = circuit.gates
    cols = [mats[a][:, G[:, a]] for a in range(circuit.arity)]
    spec = "ig,jg->ij" if circuit.arity == 2 else "ig,jg,kg->ijk"
    T = np.einsum(spec, *cols) & 1 if len(G) else np.zeros(tuple(m.shape[0] for m in mats), np.int64)
    return LogicalActionTensor(T.astype(np.uint8), tuple(labels))


# ---------------------------------------------------------------------------
# hypergraph and fountain selection


@dataclass(frozen=True)
class InteractionHypergraph:
    """Vertices are (copy, label); each hyperedge holds one label index per copy."""

    labels: tuple[tuple[str, ...], ...]
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(set(self.edges)) != len(self.edges):
            raise InputError("duplicate hyperedges")

    @property
    def vertices(self) -> tuple[tuple[int, str], ...]:
        seen = sorted({(a, e[a]) for e in self.edges for a in range(len(e))})
        return tuple((a, self.labels[a][i]) for a, i in seen)

    def edge_labels(self, e: tuple[int, ...]) -> tuple[str, ...]:
        return tuple(self.labels[a][i] for a, i in enumerate(e))


def build_interaction_hypergraph(T: LogicalActionTensor) -> InteractionHypergraph:
    return InteractionHypergraph(T.labels, tuple(T.nonzero()))


@dataclass(frozen=True)
class Selection:
    mode: str
    edges: tuple[tuple[int, ...], ...]
    off: tuple[tuple[int, int], ...]
    residual: tuple[tuple[int, ...], ...]

    @property
    def isolated(self) -> bool:
        """True when switching off ``off`` leaves exactly the selected gates."""
        return not self.residual

    def __len__(self) -> int:
        return len(self.edges)


def _disjoint(e: tuple[int, ...], f: tuple[int, ...]) -> bool:
    return all(x != y for x, y in zip(e, f))


def _exact_packing(edges: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    best: list[tuple[int, ...]] = []

    def rec(i: int, chosen: list[tuple[int, ...]]) -> None:
        nonlocal best
        if len(chosen) + (len(edges) - i) <= len(best):
            return
        if i == len(edges):
            best = list(chosen)
            return
        e = edges[i]
        if all(_disjoint(e, c) for c in chosen):
            chosen.append(e)
            rec(i + 1, chosen)
            chosen.pop()
        rec(i + 1, chosen)

    rec(0, [])
    return best


def select_disjoint_triples(G: InteractionHypergraph, mode: str = "greedy") -> Selection:
    """Pairwise vertex-disjoint hyperedges plus the logical qubits to switch off."""
    edges = sorted(G.edges, key=lambda e: (-e[0],) + tuple(e[1:]))
    if mode == "greedy":
        chosen: list[tuple[int, ...]] = []
        for e in edges:
            if all(_disjoint(e, c) for c in chosen):
                chosen.append(e)
    elif mode == "exact":
        if len(edges) > EXACT_LIMIT:
            raise InputError(f"exact selection limited to {EXACT_LIMIT} hyperedges, got {len(edges)}")
        chosen = _exact_packing(edges)
    else:
        raise InputError(f"unknown selection mode {mode!r}")
    used = {(a, e[a]) for e in chosen for a in range(len(e))}
    all_v = {(a, e[a]) for e in G.edges for a in range(len(e))}
    off = tuple(sorted(all_v - used))
    chosen_set = set(chosen)
    residual = tuple(
        sorted(e for e in G.edges if e not in chosen_set and all((a, e[a]) in used for a in range(len(e))))
    )
    return Selection(mode, tuple(sorted(chosen)), off, residual)


# ---------------------------------------------------------------------------
# state-vector oracles


@dataclass(frozen=True)
class StatevectorReport:
    passed: bool
    n_qubits: int
    logical_states: int
    stabilizers_checked: int
    mismatches: tuple[str, ...] = ()

    def lines(self) -> list[str]:
        return [
            f"statevector_passed={int(self.passed)}",
            f"n_qubits={self.n_qubits}",
            f"logical_states={self.logical_states}",
            f"stabilizers_checked={self.stabilizers_checked}",
        ] + [f"mismatch={m}" for m in self.mismatches[:10]]


def _span(rows: np.ndarray) -> np.ndarray:
    """All GF(2) combinations of the rows (as 0/1 vectors)."""
    n = rows.shape[1]
    if rows.shape[0] == 0:
        return np.zeros((1, n), dtype=np.uint8)
    from .gf2 import rref

    R, _ = rref(rows)
    coeffs = np.array(list(itertools.product((0, 1), repeat=R.shape[0])), dtype=np.int64)
    return ((coeffs @ R.astype(np.int64)) & 1).astype(np.uint8)


def _circuit_signs(circuit: PhaseCircuit, offsets: list[int], indices: np.ndarray) -> np.ndarray:
    """Apply each gate in turn to the basis states ``indices``; return the sign bits."""
    sign = np.zeros(indices.shape, dtype=np.int64)
    for gate in circuit.gates:
        hit = np.ones(indices.shape, dtype=np.int64)
        for a, q in enumerate(gate):
            hit &= (indices >> (offsets[a] + int(q))) & 1
        sign ^= hit
    return sign


def statevector_check(
    circuit: PhaseCircuit,
    codes: Sequence[CSSCode] | None = None,
    logical_bases: Sequence | None = None,
    *,
    expected: LogicalActionTensor | None = None,
    max_qubits: int = 22,
) -> StatevectorReport:
    """Simulate the circuit on explicit codewords and compare with the logical action.

    Without codes every qubit is its own logical qubit. Codewords are uniform
    superpositions over the X-stabilizer coset of a logical representative.
    """
    n_total = sum(circuit.copy_sizes)
    if n_total > max_qubits:
        raise InputError(f"{n_total} qubits exceed the state-vector limit {max_qubits}")
    if codes is None:
        codes = [trivial_code(n) for n in circuit.copy_sizes]
    if logical_bases is None:
        logical_bases = [[BitVector(n, (i,)) for i in range(n)] for n in circuit.copy_sizes]
    if expected is None:
        expected = logical_action(circuit, codes, logical_bases, check=False)
    offsets = list(np.cumsum([0] + list(circuit.copy_sizes[:-1])))
    mats = [_basis_matrix(b, c)[0].astype(np.uint8) for b, c in zip(logical_bases, codes)]
    spans = [_span(c.H_X.to_dense()) for c in codes]
    weights = [1 << np.arange(n, dtype=np.int64) for n in circuit.copy_sizes]
    mismatches: list[str] = []
    states = 0
    stab = 0
    Tv = expected.values.astype(np.int64)
    dims = [m.shape[0] for m in mats]
    shifts = [
        int(row.astype(np.int64) @ weights[a]) << offsets[a]
        for a, code in enumerate(codes)
        for row in code.H_X.to_dense()
    ]
    for ms in itertools.product(*(itertools.product((0, 1), repeat=d) for d in dims)):
        # codeword support: product over copies of (representative + X-stabilizer span)
        parts = []
        for a, m in enumerate(ms):
            rep = (np.asarray(m, dtype=np.int64) @ mats[a].astype(np.int64)) & 1
            coset = spans[a] ^ rep.astype(np.uint8)
            parts.append((coset.astype(np.int64) @ weights[a]) << offsets[a])
        idx = parts[0]
        for p in parts[1:]:
            idx = (idx[:, None] | p[None, :]).ravel()
        signs = _circuit_signs(circuit, offsets, idx)
        want = _contract(Tv, [np.asarray(m, dtype=np.int64) for m in ms]) & 1
        states += 1
        label = "".join("".join(map(str, m)) for m in ms)
        if not np.all(signs == want):
            mismatches.append(f"logical={label}")
        for shift in shifts:
            stab += 1
            if not np.array_equal(_circuit_signs(circuit, offsets, idx ^ shift), signs):
                mismatches.append(f"stabilizer logical={label} shift={shift}")
    return StatevectorReport(not mismatches, n_total, states, stab, tuple(mismatches))


def _contract(T: np.ndarray, vecs: list[np.ndarray]) -> int:
    out = T
    for v in vecs:
        out = np.tensordot(v, out, axes=(0, 0))
    return int(out)


# ---------------------------------------------------------------------------
# teleportation gadget


@dataclass(frozen=True)
class GadgetReport:
    passed: bool
    branches: int
    inputs: int
    min_fidelity: float
    max_deviation: float
    corrections: dict

    def lines(self) -> list[str]:
        out = [
            f"gadget_passed={int(self.passed)}",
            f"branches={self.branches}",
            f"inputs={self.inputs}",
            f"min_fidelity={self.min_fidelity:.15f}",
            f"max_deviation={self.max_deviation:.3e}",
        ]
        for m, gates in sorted(self.corrections.items()):
            text = " ".join(gates) if gates else "none"
            out.append(f"correction m={m} gates={text}")
        return out


def _ccz_phase(x: int) -> int:
    return int(x == 7)


def _anf(truth: np.ndarray) -> np.ndarray:
    """Algebraic normal form coefficients of a Boolean function on 3 bits."""
    c = truth.astype(np.int64).copy()
    for i in range(3):
        for x in range(8):
            if x >> i & 1:
                c[x] ^= c[x ^ (1 << i)]
    return c


def _correction(m: int) -> list[tuple[str, tuple[int, ...]]]:
    """Diagonal Clifford gates ``D`` with ``X^m CCZ X^m = CCZ D`` (derived, not tabulated)."""
    truth = np.array([_ccz_phase(x ^ m) ^ _ccz_phase(x) for x in range(8)])
    coeff = _anf(truth)
    if coeff[7]:
        raise AssertionError("conjugated CCZ correction is not Clifford")
    gates = []
    for mask in range(8):
        if coeff[mask]:
            qubits = tuple(i for i in range(3) if mask >> i & 1)
            gates.append(({0: "PHASE", 1: "Z", 2: "CZ"}[len(qubits)], qubits))
    return gates


def _apply_diag(state: np.ndarray, gates) -> np.ndarray:
    x = np.arange(8)
    sign = np.zeros(8, dtype=np.int64)
    for _name, qubits in gates:
        hit = np.ones(8, dtype=np.int64)
        for q in qubits:
            hit &= (x >> q) & 1
        sign ^= hit
    return state * (1 - 2 * sign)


def teleportation_gadget_check(n_random: int = 50, seed: int = 11, inputs: Sequence[np.ndarray] | None = None, tol: float = 1e-12) -> GadgetReport:
    """Simulate the six-qubit CCZ teleportation gadget on every measurement branch.

    Qubits 0-2 carry the input, 3-5 the resource ``CCZ|+++>``. CNOTs from each
    resource qubit onto its input partner are followed by Z measurement of the
    inputs, ``X^m`` on the resource and the derived diagonal correction.
    """
    x = np.arange(8)
    ccz = 1 - 2 * (x == 7).astype(np.int64)
    resource = ccz / np.sqrt(8)
    if inputs is None:
        rng = np.random.default_rng(seed)
        inputs = []
        for _ in range(n_random):
            v = rng.normal(size=8) + 1j * rng.normal(size=8)
            inputs.append(v / np.linalg.norm(v))
    corrections = {m: _correction(m) for m in range(8)}
    min_fid, max_dev = 1.0, 0.0
    for psi in inputs:
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        # index = q + 8 r, qubit i of q is bit i
        state = np.kron(resource, psi)
        state = state.reshape(8, 8)  # [r, q]
        after = np.zeros_like(state)
        for r in range(8):
            for q in range(8):
                after[r, q ^ r] += state[r, q]
        target = ccz * psi
        for m in range(8):
            branch = after[:, m].copy()
            prob = float(np.vdot(branch, branch).real)
            max_dev = max(max_dev, abs(prob - 1 / 8))
            branch = branch / np.sqrt(prob)
            branch = branch[x ^ m]  # X^m on the resource
            branch = _apply_diag(branch, [g for g in corrections[m] if g[0] != "PHASE"])
            if any(g[0] == "PHASE" for g in corrections[m]):
                branch = -branch
            fid = float(abs(np.vdot(target, branch)) ** 2)
            min_fid = min(min_fid, fid)
            max_dev = max(max_dev, float(np.max(np.abs(branch - target))))
    table = {
        format(m, "03b")[::-1]: [f"{name}({','.join(map(str, q))})" for name, q in corrections[m]]
        for m in range(8)
    }
    passed = abs(1 - min_fid) <= tol and max_dev <= tol
    return GadgetReport(passed, 8, len(inputs), min_fid, max_dev, table)


# ---------------------------------------------------------------------------
# text formats


def format_circuit(c: PhaseCircuit) -> str:
    name = "CZ" if c.arity == 2 else "CCZ"
    out = ["copies " + " ".join(str(s) for s in c.copy_sizes)]
    out += [name + " " + " ".join(str(int(i)) for i in g) for g in c.gates]
    return "\n".join(out) + "\n"


def parse_circuit(text: str) -> PhaseCircuit:
    lines = [l.strip() for l in text.split("\n") if l.strip()]
    if not lines or not lines[0].startswith("copies"):
        raise InputError("missing 'copies' header")
    try:
        sizes = tuple(int(t) for t in lines[0].split()[1:])
    except ValueError as exc:
        raise InputError("bad copies header") from exc
    if len(sizes) not in (2, 3):
        raise InputError("circuit must have 2 or 3 copies")
    want = "CZ" if len(sizes) == 2 else "CCZ"
    gates = []
    for i, line in enumerate(lines[1:], 2):
        parts = line.split()
        if parts[0] != want or len(parts) != len(sizes) + 1:
            raise InputError(f"line {i}: expected '{want}' with {len(sizes)} indices")
        try:
            gates.append(tuple(int(t) for t in parts[1:]))
        except ValueError as exc:
            raise InputError(f"line {i}: bad qubit index") from exc
    return PhaseCircuit(len(sizes), np.asarray(gates, dtype=np.int64).reshape(-1, len(sizes)), sizes)


def format_hypergraph(G: InteractionHypergraph) -> str:
    out = [f"hypergraph {len(G.labels)} {len(G.edges)}"]
    for a, axis in enumerate(G.labels):
        out.append(f"labels {a} " + " ".join(axis))
    out += ["edge " + " ".join(map(str, e)) for e in G.edges]
    return "\n".join(out) + "\n"


def parse_hypergraph(text: str) -> InteractionHypergraph:
    lines = [l.split() for l in text.split("\n") if l.strip()]
    if not lines or lines[0][0] != "hypergraph" or len(lines[0]) != 3:
        raise InputError("missing hypergraph header")
    arity, n_edges = int(lines[0][1]), int(lines[0][2])
    labels = []
    for a in range(arity):
        parts = lines[1 + a] if 1 + a < len(lines) else []
        if len(parts) < 2 or parts[0] != "labels" or parts[1] != str(a):
            raise InputError(f"expected 'labels {a}'")
        labels.append(tuple(parts[2:]))
    edges = []
    for parts in lines[1 + arity :]:
        if parts[0] != "edge" or len(parts) != arity + 1:
            raise InputError("malformed edge line")
        e = tuple(int(t) for t in parts[1:])
        if any(not 0 <= i < len(labels[a]) for a, i in enumerate(e)):
            raise InputError("edge label index out of range")
        edges.append(e)
    if len(edges) != n_edges:
        raise InputError("edge count does not match header")
    return InteractionHypergraph(tuple(labels), tuple(edges))


def format_selection(sel: Selection, G: InteractionHypergraph) -> str:
    out = [f"selection {sel.mode} {len(sel.edges)}", f"isolated {int(sel.isolated)}"]
    out += ["edge " + " ".join(G.edge_labels(e)) for e in sel.edges]
    out += [f"off {a} {G.labels[a][i]}" for a, i in sel.off]
    out += ["residual " + " ".join(G.edge_labels(e)) for e in sel.residual]
    return "\n".join(out) + "\n"


def parse_selection(text: str) -> dict:
    lines = [l.split() for l in text.split("\n") if l.strip()]
    if not lines or lines[0][0] != "selection" or len(lines[0]) != 3:
        raise InputError("missing selection header")
    info = {"mode": lines[0][1], "count": int(lines[0][2]), "edges": [], "off": [], "residual": []}
    for parts in lines[1:]:
        if parts[0] == "isolated":
            info["isolated"] = bool(int(parts[1]))
        elif parts[0] in ("edge", "residual"):
            info["edges" if parts[0] == "edge" else "residual"].append(tuple(parts[1:]))
        elif parts[0] == "off":
            info["off"].append((int(parts[1]), parts[2]))
        else:
            raise InputError(f"unexpected selection line {' '.join(parts)!r}")
    if len(info["edges"]) != info["count"]:
        raise InputError("selection count does not match header")
    return info
