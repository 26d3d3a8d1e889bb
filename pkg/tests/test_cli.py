from __future__ import annotations

import subprocess
import sys

import pytest

from cupcodes.cli import main
from cupcodes.complex import parse_chc
from cupcodes.cup import format_rule, torus_rule
from cupcodes.gf2 import parse_bmx


def run(capsys, *argv) -> tuple[int, str]:
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def kv(text: str) -> dict[str, str]:
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


def test_repetition_cw_homology_pipeline(tmp_path, capsys):
    H, X = tmp_path / "H.bmx", tmp_path / "X.chc"
    assert run(capsys, "gen", "--repetition", 5, "--closed", "-o", H)[0] == 0
    assert parse_bmx(H.read_text()).shape == (5, 5)
    code, out = run(capsys, "cw", "--classical", H, "-o", X)
    assert code == 0 and "poincare_symmetric=1" in out
    assert parse_chc(X.read_text()).cells == (5, 5, 5, 5, 0, 5, 5, 5, 5)
    code, out = run(capsys, "homology", X, "--grade", 3)
    assert code == 0 and kv(out)["betti"] == "1"
    code, out = run(capsys, "distance", "--complex", X, "--grade", 3, "--exact")
    assert code == 0 and kv(out)["distance"] == "5" and kv(out)["exact"] == "1"


def test_gadget_command(capsys):
    code, out = run(capsys, "verify", "gadget", "--inputs", 5)
    assert code == 0 and "branches=8" in out


def test_cup_validate_torus_rule(tmp_path, capsys):
    rule = torus_rule()
    X, good, bad = tmp_path / "T.chc", tmp_path / "torus.rule", tmp_path / "bad.rule"
    assert run(capsys, "gen", "--circle-rule", 2, "--complex-out", X, "-o", good)[0] == 0
    assert good.read_text() == format_rule(rule)
    assert run(capsys, "cup", "validate", "--complex", X, "--rule", good, "--trials", 50)[0] == 0
    bad.write_text(format_rule(rule.without_term(1, 1, 0)))
    code, out = run(capsys, "cup", "validate", "--complex", X, "--rule", bad, "--trials", 50)
    assert code == 1 and "failure=commutativity (1,1)" in out


def test_torus3_fountain_report(tmp_path, capsys):
    T, C, L, G, S = (tmp_path / n for n in ("T.chc", "c.circ", "T.tensor", "G.hg", "S.sel"))
    assert run(capsys, "gen", "--torus", 3, 2, "-o", T)[0] == 0
    code, out = run(capsys, "synth", "--complex", T, "--grades", 1, 1, 1, "-o", C)
    assert code == 0 and kv(out)["gates"] == "48"
    code, out = run(capsys, "verify", "codespace", "--circuit", C, "--complex", T, "--grades", 1, 1, 1, "-o", L)
    assert code == 0 and kv(out)["codespace_preserved"] == "1"
    assert run(capsys, "fountain", "hypergraph", L, "-o", G)[0] == 0
    code, out = run(capsys, "fountain", "select", G, "--mode", "exact", "-o", S)
    assert code == 0 and kv(out)["selected"] == "3"
    code, out = run(capsys, "report", L, S)
    assert code == 0
    assert "ccz_triples=6" in out.splitlines() and "disjoint=3" in out.splitlines()


def test_toy_report(tmp_path, capsys):
    H, X = tmp_path / "H.bmx", tmp_path / "X.chc"
    run(capsys, "gen", "--repetition", 2, "--closed", "-o", H)
    run(capsys, "cw", "--classical", H, "-o", X)
    code, out = run(capsys, "report", X, "--grade", 3)
    lines = out.splitlines()
    assert code == 0 and "K=1" in lines and "sys3=2" in lines


def test_product_commands(tmp_path, capsys):
    A = tmp_path / "A.chc"
    run(capsys, "gen", "--circle", 3, "-o", A)
    code, out = run(capsys, "product", "tensor", A, A, "-o", tmp_path / "P.chc")
    assert code == 0 and kv(out)["cells"] == "9 18 9"
    code, out = run(capsys, "product", "balanced", "--ell", 4)
    assert code == 0 and kv(out)["betti"] == "1 2 1" and kv(out)["signed_exact"] == "1"
    H = tmp_path / "H.bmx"
    run(capsys, "gen", "--regular", 8, "--dv", 3, "--dc", 4, "--seed", 2, "-o", H)
    code, out = run(capsys, "product", "lift-check", H, H)
    assert code == 0 and kv(out)["signed_exact"] == "1"


def test_statevector_command(tmp_path, capsys):
    X, R, C = tmp_path / "X.chc", tmp_path / "c3.rule", tmp_path / "c.circ"
    run(capsys, "gen", "--circle-rule", 3, "--complex-out", X, "-o", R)
    code, out = run(capsys, "synth", "--complex", X, "--rule", R, "--grades", 1, 1, 1, "-o", C)
    assert code == 0 and kv(out)["gates"] == "6"
    code, out = run(capsys, "verify", "statevector", "--circuit", C)
    assert code == 0 and kv(out)["logical_states"] == "512"


@pytest.mark.parametrize(
    "argv",
    [
        ["report"],
        ["report", "/nonexistent/file"],
        ["bogus"],
        ["gen"],
        ["homology", "/nonexistent.chc"],
        ["cw", "--classical", "/nonexistent.bmx"],
        ["fountain", "select", "/nonexistent", "--mode", "exact"],
    ],
)
def test_input_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_malformed_artifacts_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.chc"
    bad.write_text("chc 1\ncells 0 1\n")
    assert main(["homology", str(bad)]) == 2
    junk = tmp_path / "junk.txt"
    junk.write_text("hello\n")
    assert main(["report", str(junk)]) == 2


def test_precondition_failures_exit_1(tmp_path, capsys):
    H = tmp_path / "H.bmx"
    H.write_text("bmx 2 2\n0 1\n0 1\n")
    assert main(["gen", "--symmetrize", str(H)]) == 1
    # quantum double below the grade separation is a flag error
    assert main(["cw", "--quantum", str(H), str(H), "--r", "9"]) == 2


def test_same_seed_same_bytes(tmp_path, capsys):
    outs = []
    for d in ("a", "b"):
        p = tmp_path / d
        p.mkdir()
        main(["gen", "--regular", "12", "--seed", "7", "-o", str(p / "H.bmx")])
        outs.append((p / "H.bmx").read_bytes())
    assert outs[0] == outs[1]
    main(["gen", "--regular", "12", "--seed", "8", "-o", str(tmp_path / "H8.bmx")])
    assert (tmp_path / "H8.bmx").read_bytes() != outs[0]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cupcodes", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("cupcodes ")
