import io
import os
import subprocess
import sys

import pytest

from selfsim.cli import main
from selfsim.sysfile import parse_matrix_file, parse_system
from selfsim.verdict import ParseError

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "src", "selfsim",
                        "fixtures")


def fixture(name):
    return os.path.join(FIXTURES, name)


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_ok(capsys):
    code, out, _ = run_cli(["validate", fixture("grigorchuk.system")], capsys)
    assert code == 0
    assert "system axioms: ok" in out


def test_validate_dangling_edge(tmp_path, capsys):
    bad = tmp_path / "bad.system"
    bad.write_text("system bad\ngraph {\n vertex v\n edge e source v range w\n}\n"
                   "backend integer\ncocycle 1 { e -> 0 }\n")
    code, out, err = run_cli(["validate", str(bad)], capsys)
    assert code == 2
    assert "parse error" in err and "graph" in err


def test_parse_error_position(tmp_path, capsys):
    bad = tmp_path / "bad.system"
    bad.write_text("system x\nbogus line here\n")
    code, _, err = run_cli(["validate", str(bad)], capsys)
    assert code == 2
    assert "line 2" in err


def test_props_golden_grigorchuk(capsys):
    code, out, _ = run_cli(["props", fixture("grigorchuk.system"),
                            "--field-char", "2"], capsys)
    assert code == 0
    golden = os.path.join(os.path.dirname(__file__), "golden",
                          "grigorchuk_props.txt")
    with open(golden, "r", encoding="utf-8") as fh:
        assert out == fh.read()


def test_props_deterministic(capsys):
    a = run_cli(["props", fixture("grigorchuk.system")], capsys)
    b = run_cli(["props", fixture("grigorchuk.system")], capsys)
    assert a == b


def test_props_verify_flag(capsys):
    code, out, _ = run_cli(["props", fixture("grigorchuk.system"), "--verify"],
                           capsys)
    assert code == 0
    assert "certificates replayed" in out


def test_sfp_command(capsys):
    code, out, _ = run_cli(["sfp", fixture("grigorchuk.system"), "d",
                            "--budget-depth", "8"], capsys)
    assert code == 0
    assert "verdict: infinite" in out
    assert "paths=0;1110" in out


def test_sfp_bad_element(capsys):
    code, _, err = run_cli(["sfp", fixture("grigorchuk.system"), "z"], capsys)
    assert code == 3


def test_ktheory_command(tmp_path, capsys):
    mf = tmp_path / "m.matrices"
    mf.write_text("N 1\nA {\n2\n}\nB {\n1\n}\n")
    code, out, _ = run_cli(["ktheory", str(mf)], capsys)
    assert code == 0
    assert "K0=Z" in out and "K1=Z" in out


def test_homology_command(capsys):
    code, out, _ = run_cli(["homology", fixture("cuntz-2.matrices")], capsys)
    assert code == 0
    assert "H0=0" in out


def test_katsura_roundtrip(tmp_path, capsys):
    code, out, _ = run_cli(["katsura", fixture("katsura-noncommutative.matrices")],
                           capsys)
    assert code == 0
    system = parse_system(out)
    from selfsim.system import validate_system
    assert validate_system(system).valid
    from selfsim.groups import GroupElement
    one = GroupElement(system.backend, 1)
    assert system.act_edge(one, "e(1,1,0)") == "e(1,1,1)"
    assert system.cocycle_edge(one, "e(1,2,0)").payload == 2
    assert system.cocycle_edge(one, "e(3,1,0)").payload == 0


def test_desing_command(tmp_path, capsys):
    f = tmp_path / "headed.system"
    f.write_text("system headed\ngraph {\n vertex s\n vertex w\n"
                 " edge a source s range w\n edge l source w range w\n"
                 " edge m source w range w\n}\n"
                 "backend finite {\n elements 1\n mul 1 1 -> 1\n}\n"
                 "cocycle 1 { a -> 1 ; l -> 1 ; m -> 1 }\n")
    code, out, _ = run_cli(["desing", str(f), "s", "--level", "2"], capsys)
    assert code == 0
    m = parse_system(out)
    assert "v[s#2]" in m.graph.vertices
    code2, _, err = run_cli(["desing", str(f), "w"], capsys)
    assert code2 == 3


def test_sge_command(capsys):
    code, out, _ = run_cli(["sge", fixture("grigorchuk.system"),
                            "(0,a,v) * (1,b,v)"], capsys)
    assert code == 0
    assert out.strip() == "(00, b, (v))"


def test_sge_equality(capsys):
    code, out, _ = run_cli(["sge", fixture("grigorchuk.system"),
                            "(v,b,v) * (v,c,v) = (v,d,v)"], capsys)
    assert code == 0
    assert out.strip().endswith("Yes")


def test_sge_zero(capsys):
    code, out, _ = run_cli(["sge", fixture("grigorchuk.system"),
                            "(0,1,0) * (1,1,1)"], capsys)
    assert code == 0
    assert out.strip() == "0"


def test_germ_command(capsys):
    code, out, _ = run_cli(["germ", fixture("grigorchuk.system"),
                            "[v;d;v] @ (0)^inf = [v;1;v] @ (0)^inf"], capsys)
    assert code == 0 and "Yes" in out
    code, out, _ = run_cli(["germ", fixture("grigorchuk.system"),
                            "[v;d;v] @ (1)^inf = [v;1;v] @ (1)^inf"], capsys)
    assert code == 0 and "No" in out


def test_germ_product(capsys):
    code, out, _ = run_cli(["germ", fixture("grigorchuk.system"),
                            "[v;d;v] @ (0)^inf * [v;d;v] @ (0)^inf"], capsys)
    assert code == 0
    assert "dd" in out


def test_missing_file(capsys):
    code, _, err = run_cli(["validate", "/nonexistent.system"], capsys)
    assert code == 2


def test_matrix_file_errors():
    with pytest.raises(ParseError):
        parse_matrix_file("N 2\nA {\n1 0\n}\nB {\n1 0\n0 1\n}\n")
    with pytest.raises(ParseError):
        parse_matrix_file("N 1\nA {\nx\n}\nB {\n0\n}\n")


def test_console_script_installed():
    proc = subprocess.run([sys.executable, "-m", "selfsim.cli", "validate",
                           fixture("grigorchuk.system")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "system axioms: ok" in proc.stdout


def test_erschler_fixture_parses(capsys):
    code, out, _ = run_cli(["props", fixture("grigorchuk-erschler.system")],
                           capsys)
    assert code == 0
    assert "hausdorff=No" in out
    assert "minimal=Yes" in out
    assert "effective=Yes" in out


def test_cuntz_fixture(capsys):
    code, out, _ = run_cli(["props", fixture("cuntz-3.system")], capsys)
    assert code == 0
    assert "simple_cstar=Yes" in out
    assert "purely_infinite=Yes" in out
