import contextlib
import io
import json

import pytest

from nilseq.automaton import format_automaton, powers_acceptor, thue_morse
from nilseq.cli import run
from nilseq.fixtures import eleven_free_acceptor


def invoke(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = run(argv)
    out = buf.getvalue()
    payload = json.loads(out) if out.strip().startswith("{") else out
    return code, payload


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    (d / "powers2.aut").write_text(format_automaton(powers_acceptor(2)))
    (d / "tm.aut").write_text(format_automaton(thue_morse()))
    (d / "free11.aut").write_text(format_automaton(eleven_free_acceptor()))
    (d / "ex1.gp").write_text(
        "(+ (const 2) (* (sqrt 2) (pow (floor (+ (* (sqrt 3) (pow n 2))"
        " (/ 1 7))) 2)) (* n (floor (+ (pow n 3) pi))))")
    return d


def test_classify_powers(files):
    code, rep = invoke(["sparsity", "classify", "--file",
                        str(files / "powers2.aut")])
    assert code == 0
    assert rep["results"]["variant"] == "very_sparse"
    assert rep["results"]["rank"] == 1


def test_gp_eval_example(files):
    code, rep = invoke(["gp", "eval", "--expr-file", str(files / "ex1.gp"),
                        "--n", "0"])
    assert code == 0
    assert rep["results"]["value"] == 2


def test_automaton_kernel(files):
    code, rep = invoke(["automaton", "kernel", "--file", str(files / "tm.aut")])
    assert code == 0 and rep["results"]["kernel_size"] == 2


def test_unknown_flag_exits_one(files):
    code, _ = invoke(["automaton", "eval", "--file", str(files / "tm.aut"),
                      "--definitely-not-a-flag"])
    assert code == 1


def test_missing_file_exits_one():
    code, rep = invoke(["automaton", "eval", "--file", "/nonexistent.aut",
                        "--n", "1"])
    assert code == 1


def test_ips_report_verifies(files, tmp_path):
    code, rep = invoke(["sparsity", "ips", "--file", str(files / "free11.aut"),
                        "--horizon", "500"])
    assert code == 0
    path = tmp_path / "ips.json"
    path.write_text(json.dumps(rep))
    code2, rep2 = invoke(["verify", "--report", str(path)])
    assert code2 == 0 and rep2["results"]["verified"] is True


def test_pump_report_verifies(files, tmp_path):
    code, rep = invoke(["automaton", "pump", "--file", str(files / "powers2.aut"),
                        "--value", "1"])
    assert code == 0
    path = tmp_path / "pump.json"
    path.write_text(json.dumps(rep))
    code2, rep2 = invoke(["verify", "--report", str(path)])
    assert code2 == 0 and rep2["results"]["verified"] is True


def test_tampered_report_fails_verification(files, tmp_path):
    code, rep = invoke(["sparsity", "ips", "--file", str(files / "free11.aut"),
                        "--horizon", "200"])
    cert = rep["certificates"][0]
    # 3 = 11_2 is not eleven-free, so this n0 cannot witness membership
    cert["n0"] = 3
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(rep))
    code2, rep2 = invoke(["verify", "--report", str(path)])
    assert rep2["results"]["verified"] is False


def test_determinism(files):
    argv = ["sparsity", "growth", "--file", str(files / "powers2.aut"),
            "--log2-max", "14"]
    _, rep1 = invoke(argv)
    _, rep2 = invoke(argv)
    rep1.pop("timing_seconds")
    rep2.pop("timing_seconds")
    assert rep1 == rep2


def test_fib_subcommand():
    code, rep = invoke(["fib", "--a", "1", "--horizon", "10000"])
    assert code == 0
    assert rep["results"]["head_difference"] == []


def test_ip_fs_subcommand():
    code, rep = invoke(["ip", "fs", "--gens", "1,2,4", "--depth", "3"])
    assert code == 0
    assert rep["results"]["first"] == [1, 2, 3, 4, 5, 6, 7]


def test_orbit_heis_subcommand():
    code, rep = invoke(["orbit", "heis", "--alpha", "sqrt(2)",
                        "--beta", "sqrt(3)", "--n", "5"])
    assert code == 0
    assert len(rep["results"]["fracpart"]) == 3


def test_pisot_invalid_params():
    code, rep = invoke(["pisot", "check", "--a", "0", "--b", "2"])
    assert code == 0
    assert rep["results"]["valid"] is False


def test_csv_output(files):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = run(["--format", "csv", "gp", "scan", "--expr-file",
                    str(files / "ex1.gp"), "--range", "0", "4"])
    assert code == 0
    assert buf.getvalue().startswith("n,value")


def test_demo_dichotomy():
    code, rep = invoke(["demo", "dichotomy"])
    assert code == 0
    rows = rep["results"]["fixtures"]
    assert len(rows) == 10
    variants = {r["fixture"]: r["variant"] for r in rows}
    assert variants["powers_of_2"] == "very_sparse"
    assert variants["baum_sweet"] == "condition_i"
