import json
import subprocess
import sys
import time

import pytest

from qcaterpillar.cli import main


def run(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "qcaterpillar", *args], capture_output=True, text=True, cwd=cwd)


def test_gen_stalk(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert main(["gen", "--stalk", "5,3,2,4", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["interior_degrees"] == [5, 3, 2, 4] and doc["p"] == 12
    assert doc["tree"]["root"] == 0


def test_gen_random(tmp_path):
    assert main(["gen", "--p", "2", "--out", str(tmp_path / "a.json")]) == 0
    assert json.loads((tmp_path / "a.json").read_text())["interior_degrees"] == []
    for name in ("b", "c"):
        assert main(["gen", "--p", "6", "--seed", "1", "--out", str(tmp_path / f"{name}.json")]) == 0
    assert (tmp_path / "b.json").read_bytes() == (tmp_path / "c.json").read_bytes()


def test_usage_errors(tmp_path, capsys):
    assert main(["gen", "--stalk", "5,1"]) == 1
    assert main(["gen"]) == 1
    assert main(["forward", "--stalk", "3", "--l", "-1"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 1
    f = tmp_path / "x.csv"
    f.write_text("index,lambda\n")
    assert main(["recover", str(f), str(f)]) == 1
    assert main(["recover", str(f), str(tmp_path / "y.csv"), "--out", str(f)]) == 1


def test_forward_files(tmp_path, capsys):
    prefix = tmp_path / "sp"
    assert main(["forward", "--stalk", "5,3,2,4", "--windows", "3", "--out", str(prefix)]) == 0
    lines = (tmp_path / "sp_dirichlet.csv").read_text().splitlines()
    assert lines[0] == "index,lambda,sqrt_lambda,branch_kind,branch_i,window_k"
    assert len(lines) - 1 == 3 * 22


def test_forward_single_edge_l_pi(tmp_path, capsys):
    assert main(["forward", "--stalk", "", "--l", "3.141592653589793", "--windows", "2",
                 "--out", str(tmp_path / "e")]) == 0
    rows = (tmp_path / "e_neumann.csv").read_text().splitlines()[1:]
    assert [round(float(r.split(",")[2]), 12) for r in rows] == [0, 1, 2, 3]


def test_forward_noise_reproducible(tmp_path, capsys):
    for name in ("a", "b"):
        assert main(["forward", "--stalk", "3,2", "--noise", "0.1", "--decay", "1/k", "--seed", "4",
                     "--windows", "5", "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a_neumann.csv").read_bytes() == (tmp_path / "b_neumann.csv").read_bytes()


def test_polys_and_expand(tmp_path, capsys):
    out = tmp_path / "p.json"
    assert main(["polys", "--stalk", "5,3,2,4", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert set(doc) >= {"psi", "theta", "omega", "ratio"}
    assert doc["ratio"]["num"]["coeffs"][-1] == "-120/1"
    res = tmp_path / "e.json"
    assert main(["expand", str(out), "--out", str(res)]) == 0
    got = json.loads(res.read_text())
    assert got["interior_degrees"] == [5, 3, 2, 4] and len(got["trace"]) == 4


def test_expand_rounded_and_failure(tmp_path, capsys):
    f = tmp_path / "r.json"
    f.write_text(json.dumps({"num": [0.0, 40.0, 0.0, -189.0, 0.0, 269.0, 0.0, -120.0],
                             "den": [-30.0, 0.0, 156.0, 0.0, -245.0, 0.0, 120.0]}))
    assert main(["expand", str(f), "--out", str(tmp_path / "o.json")]) == 0
    assert json.loads((tmp_path / "o.json").read_text())["mode"] == "rounded"
    f.write_text(json.dumps({"num": {"coeffs": ["0", "-2"]}, "den": {"coeffs": ["1"]}}))
    assert main(["expand", str(f)]) == 2


def test_recover_round_trip(tmp_path, capsys):
    prefix = tmp_path / "sp"
    assert main(["forward", "--stalk", "5,3,2,4", "--out", str(prefix)]) == 0
    rep = tmp_path / "rep.json"
    plot = tmp_path / "plot.csv"
    code = main(["recover", f"{prefix}_neumann.csv", f"{prefix}_dirichlet.csv", "--out", str(rep),
                 "--plot-data", str(plot)])
    assert code == 0
    doc = json.loads(rep.read_text())
    assert doc["status"] == "success" and doc["interior_degrees"] == [5, 3, 2, 4]
    text = plot.read_text().splitlines()
    assert text[0] == "series,spectrum,sqrt_lambda,residue,cluster,value"
    assert sum(1 for r in text if r.startswith("root,alpha")) == 12


def test_recover_failure_exit_code(tmp_path, capsys):
    prefix = tmp_path / "sp"
    assert main(["forward", "--stalk", "5,3,2,4", "--windows", "20", "--noise", "0.5",
                 "--out", str(prefix)]) == 0
    code = main(["recover", f"{prefix}_neumann.csv", f"{prefix}_dirichlet.csv", "--windows", "20",
                 "--out", str(tmp_path / "rep.json")])
    doc = json.loads((tmp_path / "rep.json").read_text())
    assert (code, doc["status"]) in ((2, "failure"), (0, "success"))
    if code == 0:
        assert doc["interior_degrees"] == [5, 3, 2, 4]


def test_enumerate(tmp_path, capsys):
    out = tmp_path / "e.json"
    assert main(["enumerate", "--p", "10", "--check-unique", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["unique"] is True and doc["count"] == 128
    assert "unique: true" in capsys.readouterr().err


def test_deterministic_bytes(tmp_path):
    for name in ("a", "b"):
        r = run("polys", "--stalk", "4,2,3", "--out", str(tmp_path / f"{name}.json"))
        assert r.returncode == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_worked_example_subprocess():
    t0 = time.perf_counter()
    r = run("paper-example")
    elapsed = time.perf_counter() - t0
    assert r.returncode == 0, r.stdout + r.stderr
    assert "PASS" in r.stdout
    assert elapsed < 1.0
