"""Command-line front end: file-based pipeline over bmx/chc/rule/circuit artifacts.

Exit codes: 0 success, 1 verification or validation failure, 2 input, I/O or
flag error. Results are printed as ``key=value`` lines; artifacts go to
``--out`` when given and to stdout otherwise.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .complex import (
    ChainComplex,
    betti_numbers,
    cohomology_basis,
    css_extract,
    format_chc,
    homology_basis,
    parse_chc,
)
from .constructors import (
    balanced_product,
    circle,
    circle_action,
    classical_complex,
    random_full_rank,
    random_regular_code,
    repetition_code,
    symmetrize,
    tensor_product,
    toric_complex,
    z_lift_tensor,
)
from .cup import (
    Cochain,
    SimplicialComplex,
    circle_rule,
    evaluate_cup,
    format_cochains,
    format_rule,
    fundamental_cycle,
    parse_cochains,
    parse_rule,
    product_cup_rule,
    torus_triangulation,
    triple_tensor,
    validate_cup_rule,
)
from .cw import classical_cw_complex, poincare_report, quantum_cw_complex
from .distance import cosystole, systole
from .errors import ConstructionError, InputError, InvariantError, NoNontrivialClassError, PreconditionError, UnsupportedGradeError
from .gates import (
    build_interaction_hypergraph,
    codespace_check,
    format_circuit,
    format_hypergraph,
    format_selection,
    logical_action,
    parse_circuit,
    parse_hypergraph,
    parse_selection,
    select_disjoint_triples,
    statevector_check,
    synthesize_circuit,
    teleportation_gadget_check,
)
from .gf2 import format_bmx, parse_bmx, rank
from .tensor import format_tensor, parse_tensor

log = logging.getLogger("cupcodes")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class VerificationFailed(Exception):
    """Raised by a subcommand whose check ran but did not pass."""


# ---------------------------------------------------------------------------
# helpers


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _say(*lines: str) -> None:
    for line in lines:
        print(line)


def _load_complex(path: str) -> ChainComplex:
    """chc files load directly; bmx files become the two-term classical complex."""
    text = _read(path)
    if text.startswith("chc"):
        return parse_chc(text)
    return classical_complex(parse_bmx(text))


def _evaluator(X: ChainComplex, rule_path: str | None):
    if rule_path:
        return parse_rule(_read(rule_path), X)
    if X.faces is None:
        raise InputError("complex has no face tables; pass --rule")
    return SimplicialComplex.from_chain_complex(X)


def _load_sigma(X: ChainComplex, path: str | None, grade: int):
    if path is None:
        if grade != X.top_grade:
            raise InputError("default cycle is the fundamental class; grades must sum to the top grade")
        return fundamental_cycle(X)
    (c,) = parse_cochains(_read(path))
    return c.values


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args, rng) -> None:
    if args.repetition is not None:
        _emit(format_bmx(repetition_code(args.repetition, closed=args.closed)), args.out)
    elif args.regular is not None:
        H = random_regular_code(args.regular, args.dv, args.dc, rng)
        _emit(format_bmx(H), args.out)
    elif args.random_full_rank is not None:
        m, n = args.random_full_rank
        _emit(format_bmx(random_full_rank(m, n, rng, args.density)), args.out)
    elif args.symmetrize is not None:
        _emit(format_bmx(symmetrize(parse_bmx(_read(args.symmetrize)))), args.out)
    elif args.toric is not None:
        _emit(format_chc(toric_complex(args.toric)), args.out)
    elif args.circle is not None:
        _emit(format_chc(circle(args.circle)), args.out)
    elif args.torus is not None:
        dim, L = args.torus
        _emit(format_chc(torus_triangulation(dim, L).chain_complex), args.out)
    elif args.circle_rule is not None:
        rule = circle_rule(args.circle_length)
        base = rule
        for _ in range(args.circle_rule - 1):
            rule = product_cup_rule(rule, base)
        if args.complex_out:
            _emit(format_chc(rule.domain), args.complex_out)
        _emit(format_rule(rule), args.out)


def cmd_product(args, rng) -> None:
    if args.kind == "tensor":
        if len(args.inputs) < 2:
            raise InputError("tensor product needs at least two inputs")
        P = _load_complex(args.inputs[0])
        for path in args.inputs[1:]:
            P = tensor_product(P, _load_complex(path))
        _say(f"cells={' '.join(map(str, P.cells))}")
        _emit(format_chc(P), args.out)
    elif args.kind == "lift-check":
        if len(args.inputs) != 2:
            raise InputError("lift-check needs exactly two inputs")
        _, rep = z_lift_tensor(_load_complex(args.inputs[0]), _load_complex(args.inputs[1]))
        _say(*rep.lines())
        if not rep.exact_zero:
            raise VerificationFailed("signed lift does not square to zero")
    else:
        L = args.ell
        X = circle(L)
        P, rep = balanced_product(X, X, L, (circle_action(L), circle_action(L)))
        _say(f"cells={' '.join(map(str, P.cells))}", f"betti={' '.join(map(str, betti_numbers(P)))}", *rep.lines())
        if args.out:
            _emit(format_chc(P), args.out)
        if not rep.exact_zero:
            raise VerificationFailed("signed lift of the balanced product is not exact")


def cmd_cw(args, rng) -> None:
    if args.classical:
        D = classical_cw_complex(parse_bmx(_read(args.classical)), r=args.r or 8)
    else:
        hx, hz = args.quantum
        D = quantum_cw_complex(parse_bmx(_read(hx)), parse_bmx(_read(hz)), r=args.r or 11)
    _say(f"cells={' '.join(map(str, D.complex.cells))}", *poincare_report(D).lines())
    _emit(format_chc(D.complex), args.out)


def cmd_homology(args, rng) -> None:
    X = _load_complex(args.complex)
    if args.grade is None:
        _say(f"betti={' '.join(map(str, betti_numbers(X)))}")
        return
    basis = (cohomology_basis if args.cohomology else homology_basis)(X, args.grade)
    _say(f"grade={args.grade}", f"betti={basis.betti}")
    if args.out:
        _emit(format_cochains([Cochain(args.grade, v) for v in basis.representatives]), args.out)


def cmd_cup(args, rng) -> None:
    X = _load_complex(args.complex)
    if args.action == "validate":
        if not args.rule:
            raise InputError("cup validate needs --rule")
        rep = validate_cup_rule(parse_rule(_read(args.rule), X), trials=args.trials, seed=args.seed)
        _say(*rep.lines())
        if not rep.passed:
            raise VerificationFailed(rep.failure)
        return
    ev = _evaluator(X, args.rule)
    if args.action == "eval":
        if not args.cochains:
            raise InputError("cup eval needs --cochains")
        result = evaluate_cup(ev, parse_cochains(_read(args.cochains)))
        _emit(format_cochains([result]), args.out)
        return
    grades = args.grades
    sigma = _load_sigma(X, args.sigma, sum(grades))
    bases = [cohomology_basis(X, g) for g in grades]
    T = triple_tensor(ev, bases, sigma, grades, spot_checks=args.spot_checks, seed=args.seed)
    _say(f"nonzero={T.nnz}")
    _emit(format_tensor(T), args.out)


def cmd_synth(args, rng) -> None:
    X = _load_complex(args.complex)
    ev = _evaluator(X, args.rule)
    sigma = _load_sigma(X, args.sigma, sum(args.grades))
    C = synthesize_circuit(ev, args.grades, sigma)
    _say(f"gates={len(C)}", f"max_qubit_load={C.max_qubit_load()}")
    _emit(format_circuit(C), args.out)


def _codes(args, circuit):
    if not args.complex:
        return None
    if not args.grades or len(args.grades) != circuit.arity:
        raise InputError("--grades must give one qubit grade per copy")
    X = _load_complex(args.complex)
    return X, [css_extract(X, g) for g in args.grades]


def cmd_verify(args, rng) -> None:
    if args.check == "gadget":
        rep = teleportation_gadget_check(n_random=args.inputs, seed=args.seed)
        _say(*rep.lines())
        if not rep.passed:
            raise VerificationFailed("gadget fidelity below tolerance")
        return
    if not args.circuit:
        raise InputError(f"verify {args.check} needs --circuit")
    C = parse_circuit(_read(args.circuit))
    loaded = _codes(args, C)
    if args.check == "codespace":
        if loaded is None:
            raise InputError("verify codespace needs --complex and --grades")
        X, codes = loaded
        rep = codespace_check(C, codes, threads=args.threads)
        _say(*rep.lines())
        if not rep.passed:
            raise VerificationFailed("circuit does not preserve the code space")
        if args.out:
            bases = [cohomology_basis(X, g) for g in args.grades]
            T = logical_action(C, codes, bases, check=False)
            _say(f"logical_nonzero={T.nnz}")
            _emit(format_tensor(T), args.out)
        return
    if loaded is None:
        rep = statevector_check(C, max_qubits=args.max_qubits)
    else:
        X, codes = loaded
        bases = [cohomology_basis(X, g) for g in args.grades]
        rep = statevector_check(C, codes, bases, max_qubits=args.max_qubits)
    _say(*rep.lines())
    if not rep.passed:
        raise VerificationFailed("state-vector simulation disagrees")


def cmd_distance(args, rng) -> None:
    X = _load_complex(args.complex)
    exact = True if args.exact else None
    fn = cosystole if args.cohomology else systole
    res = fn(X, args.grade, args.budget, exact=exact, seed=args.seed, threads=args.threads)
    _say(f"grade={args.grade}", f"kind={'cosystole' if args.cohomology else 'systole'}", *res.lines())


def cmd_fountain(args, rng) -> None:
    if args.action == "hypergraph":
        G = build_interaction_hypergraph(parse_tensor(_read(args.input)))
        _say(f"hyperedges={len(G.edges)}", f"vertices={len(G.vertices)}")
        _emit(format_hypergraph(G), args.out)
    else:
        G = parse_hypergraph(_read(args.input))
        sel = select_disjoint_triples(G, args.mode)
        _say(f"selected={len(sel)}", f"off={len(sel.off)}", f"isolated={int(sel.isolated)}")
        _emit(format_selection(sel, G), args.out)


def _report_artifact(path: str, grade: int | None, budget: int, seed: int) -> list[str]:
    text = _read(path)
    head = text.split(None, 1)[0] if text.strip() else ""
    out = [f"artifact={path}"]
    if head == "chc":
        X = parse_chc(text)
        out.append(f"cells={' '.join(map(str, X.cells))}")
        out.append(f"betti={' '.join(map(str, betti_numbers(X)))}")
        prep = poincare_report(X)
        out += [f"poincare {line}" for line in prep.lines()]
        if grade is not None:
            code = css_extract(X, grade)
            out += [f"N={code.n_qubits}", f"K={code.k}"]
            for name, fn in ((f"sys{grade}", systole), (f"cosys{grade}", cosystole)):
                try:
                    res = fn(X, grade, budget, seed=seed)
                    out.append(f"{name}={res.value}")
                    out.append(f"{name}_exact={int(res.exact)}")
                except NoNontrivialClassError:
                    out.append(f"{name}=none")
    elif head == "tensor":
        T = parse_tensor(text)
        key = "ccz_triples" if T.arity == 3 else "cz_pairs"
        out.append(f"{key}={T.nnz}")
        out.append(f"shape={' '.join(map(str, T.shape))}")
    elif head == "hypergraph":
        G = parse_hypergraph(text)
        out += [f"hyperedges={len(G.edges)}", f"vertices={len(G.vertices)}"]
    elif head == "selection":
        info = parse_selection(text)
        out += [f"disjoint={info['count']}", f"off={len(info['off'])}", f"isolated={int(info.get('isolated', False))}"]
    elif head == "copies":
        C = parse_circuit(text)
        out += [f"gates={len(C)}", f"arity={C.arity}", f"max_qubit_load={C.max_qubit_load()}"]
    elif head == "bmx":
        H = parse_bmx(text)
        out += [f"rows={H.rows}", f"cols={H.cols}", f"rank={rank(H)}"]
    else:
        raise InputError(f"unrecognized artifact {path}")
    return out


def cmd_report(args, rng) -> None:
    if not args.artifacts:
        raise InputError("report needs at least one artifact")
    lines = []
    for path in args.artifacts:
        lines += _report_artifact(path, args.grade, args.budget, args.seed)
    _emit("\n".join(lines) + "\n", args.out)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice in this run")
    common.add_argument("--out", "-o", default=None, help="artifact output path (stdout if omitted)")
    common.add_argument("--threads", type=int, default=1)

    parser = argparse.ArgumentParser(prog="cupcodes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cupcodes {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate matrices, complexes and cup rules")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--repetition", type=int, metavar="N")
    g.add_argument("--regular", type=int, metavar="N")
    g.add_argument("--random-full-rank", type=int, nargs=2, metavar=("M", "N"))
    g.add_argument("--symmetrize", metavar="H.bmx")
    g.add_argument("--toric", type=int, metavar="L")
    g.add_argument("--circle", type=int, metavar="L")
    g.add_argument("--torus", type=int, nargs=2, metavar=("DIM", "L"))
    g.add_argument("--circle-rule", type=int, metavar="POWER")
    p.add_argument("--closed", action="store_true")
    p.add_argument("--dv", type=int, default=3)
    p.add_argument("--dc", type=int, default=4)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--circle-length", type=int, default=1)
    p.add_argument("--complex-out", default=None, help="where to write the domain of a generated rule")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("product", parents=[common], help="tensor/balanced products and lift checks")
    p.add_argument("kind", choices=["tensor", "balanced", "lift-check"])
    p.add_argument("inputs", nargs="*")
    p.add_argument("--ell", type=int, default=4, help="circle length and group order for balanced")
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("cw", parents=[common], help="mirror-doubled CW complexes")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--classical", metavar="H.bmx")
    g.add_argument("--quantum", nargs=2, metavar=("HX.bmx", "HZ.bmx"))
    p.add_argument("--r", type=int, default=None)
    p.set_defaults(func=cmd_cw)

    p = sub.add_parser("homology", parents=[common], help="Betti numbers and representatives")
    p.add_argument("complex")
    p.add_argument("--grade", type=int, default=None)
    p.add_argument("--cohomology", action="store_true")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("cup", parents=[common], help="cup products, rule validation, triple tensors")
    p.add_argument("action", choices=["eval", "validate", "tensor"])
    p.add_argument("--complex", required=True)
    p.add_argument("--rule", default=None)
    p.add_argument("--cochains", default=None)
    p.add_argument("--grades", type=int, nargs="+", default=[1, 1, 1])
    p.add_argument("--sigma", default=None, help="cochain file holding the top cycle")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--spot-checks", type=int, default=0)
    p.set_defaults(func=cmd_cup)

    p = sub.add_parser("synth", parents=[common], help="synthesize CZ/CCZ circuits")
    p.add_argument("--complex", required=True)
    p.add_argument("--rule", default=None)
    p.add_argument("--grades", type=int, nargs="+", required=True)
    p.add_argument("--sigma", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", parents=[common], help="codespace, state-vector and gadget checks")
    p.add_argument("check", choices=["codespace", "statevector", "gadget"])
    p.add_argument("--circuit", default=None)
    p.add_argument("--complex", default=None)
    p.add_argument("--grades", type=int, nargs="+", default=None)
    p.add_argument("--max-qubits", type=int, default=22)
    p.add_argument("--inputs", type=int, default=50, help="random input states for the gadget")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("distance", parents=[common], help="systoles and cosystoles")
    p.add_argument("--complex", required=True)
    p.add_argument("--grade", type=int, required=True)
    p.add_argument("--cohomology", action="store_true")
    m = p.add_mutually_exclusive_group()
    m.add_argument("--exact", action="store_true")
    m.add_argument("--budget", type=int, default=200)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("fountain", parents=[common], help="interaction hypergraph and disjoint selection")
    p.add_argument("action", choices=["hypergraph", "select"])
    p.add_argument("input")
    p.add_argument("--mode", choices=["greedy", "exact"], default="greedy")
    p.set_defaults(func=cmd_fountain)

    p = sub.add_parser("report", parents=[common], help="summary of pipeline artifacts")
    p.add_argument("artifacts", nargs="*")
    p.add_argument("--grade", type=int, default=None)
    p.add_argument("--budget", type=int, default=200)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    if not logging.getLogger().handlers:
        logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s", stream=sys.stderr)
    log.info("version=%s seed=%d command=%s", __version__, args.seed, args.command)
    rng = np.random.default_rng(args.seed)
    try:
        args.func(args, rng)
    except VerificationFailed as exc:
        log.error("verification failed: %s", exc)
        return EXIT_FAIL
    except (PreconditionError, InvariantError, ConstructionError) as exc:
        log.error("%s", exc)
        return EXIT_FAIL
    except (InputError, UnsupportedGradeError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
