import io
import json
import subprocess
import sys

import pytest

from resolvex.cli import run
from resolvex.data import fixture_text
from resolvex.textio import parse_automaton


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def report(*argv):
    code, out, _ = call(*argv)
    return code, json.loads(out)


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name in ("fig1a", "fig1b", "fnfa4", "ufa-scc", "infamb", "simple2", "pump2"):
        ext = ".pfa" if name == "simple2" else ".nfa"
        p = tmp_path / (name + ext)
        p.write_text(fixture_text(name))
        paths[name] = str(p)
    return paths


def test_check_pr_fig1b(files):
    code, rep = report("check-pr", files["fig1b"])
    assert code == 1 and rep["verdict"] == "No"
    assert rep["witness"]["word"] == "bb"


def test_lambda_maximize_fig1a(files):
    code, rep = report("lambda", files["fig1a"], "--maximize")
    assert code == 0 and rep["lambda"] == "1/2" and rep["status"] == "Certified"


def test_classify_infamb(files):
    code, rep = report("classify", files["infamb"])
    assert code == 0 and rep["kind"] == "Infinite"


def test_fixture_name_fallback():
    code, rep = report("classify", "fnfa4.nfa")
    assert code == 0 and rep["class"] == "Finite(4)"


def test_check_lambda_codes(files):
    assert report("check-lambda", files["fig1a"], "1/2")[0] == 0
    assert report("check-lambda", files["fig1a"], "501/1000")[0] == 1
    assert report("lambda", files["pump2"], "--lambda", "1/4")[0] == 2


def test_check_pr_infinite_is_unknown(files):
    code, rep = report("check-pr", files["infamb"])
    assert code == 2 and rep["verdict"] == "Unknown"


def test_deterministic_reports(files):
    for argv in (("lambda", files["pump2"], "--maximize"), ("check-pr", files["fnfa4"]),
                 ("primitives", files["fnfa4"])):
        assert call(*argv)[1] == call(*argv)[1]


def test_seed_from_environment(files, monkeypatch):
    argv = ("eval", files["simple2"], "--word", "abab", "--mc", "500")
    monkeypatch.setenv("RESOLVEX_SEED", "9")
    a = call(*argv)[1]
    b = call(*argv, "--seed", "9")[1]
    monkeypatch.setenv("RESOLVEX_SEED", "10")
    c = call(*argv)[1]
    assert a == b and a != c


def test_timing_only_on_request(files):
    _, rep = report("lambda", files["fig1a"], "--maximize")
    assert "seconds" not in rep["telemetry"]
    _, rep = report("--timing", "lambda", files["fig1a"], "--maximize")
    assert rep["telemetry"]["seconds"] >= 0


def test_witness_certificate_reverifies(files):
    code, rep = report("check-pr", files["fnfa4"])
    assert code == 1
    for entry in rep["supports"]:
        spec = ",".join(map(str, entry["support"]))
        c, v = report("verify", files["fnfa4"], "--witness", entry["witness"], "--support", spec)
        assert c == 0 and v["ok"]


def test_broken_witness_fails_verification(files):
    bad = "x0=ab y1=a x1=ab y2=b x2=ac; Q1={q1,q3} p1=q1 R1={qf} Q2={q4,q6} p2=q6 R2={qf}"
    code, rep = report("verify", files["fnfa4"], "--witness", bad)
    assert code == 1 and any(d.startswith("condition 3") for d in rep["diagnostics"])


def test_resolver_certificate_reverifies(files, tmp_path):
    for name, lam in (("fig1a", "1/2"), ("pump2", "1/5")):
        _, rep = report("lambda", files[name], "--maximize")
        assert rep["lambda"] == lam
        rfile = tmp_path / f"{name}.res"
        rfile.write_text(rep["resolver"])
        code, v = report("verify", files[name], "--resolver", str(rfile), "--lambda", lam)
        assert code == 0 and v["ok"]
        code, v = report("verify", files[name], "--resolver", str(rfile), "--lambda", "9/10")
        assert code == 1 and not v["ok"]


def test_eval_with_resolver(files, tmp_path):
    _, rep = report("synthesize", files["ufa-scc"])
    assert rep["lambda_star"] == "1/3" and rep["g"]["q1"] == 3 and rep["f"]["q1"] == "b"
    rfile = tmp_path / "r.res"
    rfile.write_text(rep["resolver"])
    code, ev = report("eval", files["ufa-scc"], "--resolver", str(rfile), "--word", "bd")
    assert code == 0 and ev["probability"] == "1/3"


def test_constraints_and_primitives(files):
    code, out, _ = call("constraints", files["fig1a"])
    assert code == 0 and "simplex x0 + x1 = 1" in out
    code, out, _ = call("constraints", files["fnfa4"], "--format", "smt", "--lambda", "1/2")
    assert out.startswith("(set-logic QF_NRA)") and out.rstrip().endswith("(check-sat)")
    _, rep = report("primitives", files["fig1b"])
    assert [w["word"] for w in rep["words"]] == ["b", "bb"]


def test_unary_and_markov(files, tmp_path):
    gen_code, text, _ = call("gen", "unary-hard", "2:0")
    f = tmp_path / "u.nfa"
    f.write_text(text)
    code, rep = report("unary", str(f))
    assert gen_code == 0 and code == 1 and rep["failing"][0]["residue"] == 1
    m = tmp_path / "m.txt"
    m.write_text("matrix 2\n0 1\n1 0\ninitial 1 0\nend\n")
    code, rep = report("markov", str(m))
    assert code == 0 and rep["period"] == 2
    assert rep["limits"] == [["1/1", "0/1"], ["0/1", "1/1"]]


def test_generators_emit_parsable_automata(files):
    for argv in (("gen", "spectrum", "2", "3"), ("gen", "unary-hard", "2:all,3:all"),
                 ("gen", "undec", files["simple2"])):
        code, text, _ = call(*argv)
        assert code == 0
        parse_automaton(text)


def test_dot_output(files):
    code, out, _ = call("dot", files["fig1b"])
    assert code == 0 and out.startswith("digraph")
    code, out, _ = call("dot", files["fig1b"], "--gamma")
    assert code == 0 and out.count("->") >= 4


def test_error_codes(files, tmp_path):
    assert call("classify")[0] == 64
    assert call("frobnicate", files["fig1a"])[0] == 64
    assert call("classify", str(tmp_path / "missing.nfa"))[0] == 66
    broken = tmp_path / "broken.nfa"
    broken.write_text("nfa x\nalphabet a\nstate q0 init\ntrans q0 a qX\nend\n")
    code, _, err = call("classify", str(broken))
    assert code == 65 and "qX" in err
    assert call("gen", "spectrum", "2", "4")[0] == 64
    assert call("check-lambda", files["fig1a"], "one-half")[0] == 64


def test_text_output(files):
    code, out, _ = call("--text", "classify", files["fig1a"])
    assert code == 0 and "kind: Unambiguous" in out.splitlines()


def test_module_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "resolvex", "classify", files["fnfa4"]],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["degree"] == 4
