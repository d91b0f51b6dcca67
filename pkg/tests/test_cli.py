import json
import shutil
import subprocess
import sys

import pytest

from nls_frames.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_kernel_fiber_csv(capsys):
    code, out, _ = run(capsys, "kernel", "--scenario", "fiber", "--nt", "11")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("t,mu,alpha")
    assert len(lines) == 12


def test_kernel_caustic_exit_code(capsys):
    code, out, _ = run(capsys, "kernel", "--scenario", "trap", "--c0", "0", "--method", "direct",
                       "--param", "alpha=-0.5", "--format", "json")
    assert code == 2
    side = json.loads(out)
    assert side["caustics"]


def test_scenario_file_errors(capsys, tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("t_domain = [0,")
    code, _, err = run(capsys, "kernel", "--scenario", str(bad))
    assert code == 1 and "TOML" in err
    code, _, err = run(capsys, "kernel", "--scenario", str(tmp_path / "missing.toml"))
    assert code == 1


def test_scenario_file_kernel(capsys, tmp_path):
    f = tmp_path / "s.json"
    f.write_text(json.dumps({"name": "mine", "t_domain": [0, 0.5], "a": "1 + 0.1*t", "f": 0.2}))
    code, out, _ = run(capsys, "kernel", "--scenario", str(f), "--format", "json")
    assert code == 0 and json.loads(out)["scenario"] == "mine"


def test_verify_reports_mismatch_for_control(capsys):
    base = ("verify", "--family", "quintic_pulse", "--param", "k=1.5", "--param", "v=0.3",
            "--x0", "-40", "--x1", "40", "--nx", "2048", "--nt", "5")
    code, out, _ = run(capsys, *base)
    assert code == 0
    rep = json.loads(out)
    assert not rep["mismatch"] and rep["report"]["rel_residual_sup"] < 1e-6
    code, out, _ = run(capsys, *base, "--control", "sign-flip")
    assert code == 0 and json.loads(out)["mismatch"]


def test_solve_and_gun(capsys):
    code, out, _ = run(capsys, "solve", "--family", "osc_pulse", "--param", "k=1.5", "--nx", "5", "--nt", "2")
    assert code == 0
    assert out.splitlines()[0] == "x,t,re,im" and len(out.splitlines()) == 11
    code, out, _ = run(capsys, "solve", "--family", "airy_gun", "--param", "g=1", "--param", "t1=1.5",
                       "--param", "x0=-2.25", "--format", "json")
    assert code == 0 and json.loads(out)["C2"] == pytest.approx(3.375)


def test_connect(capsys):
    code, out, _ = run(capsys, "connect", "--param", "k0=0.5")
    d = json.loads(out)
    assert code == 0
    assert abs(d["fitted"]["r2"] - d["closed_form"]["r2"]) / d["closed_form"]["r2"] < 0.02
    code, out, _ = run(capsys, "connect", "--param", "k0=1.2")
    assert code == 0 and json.loads(out)["pole"]["exponent"] == pytest.approx(-1, abs=0.02)
    code, _, _ = run(capsys, "connect")
    assert code == 1


def test_wigner_closed_numeric_agree(capsys):
    args = ("wigner", "--family", "osc_pulse", "--param", "k=1.5", "--param", "t=0.2", "--nx", "4",
            "--param", "np=4", "--param", "p0=-2", "--param", "p1=2")
    _, closed, _ = run(capsys, *args)
    _, numeric, _ = run(capsys, *args, "--method", "numeric")
    c = [float(r.split(",")[2]) for r in closed.splitlines()[1:]]
    n = [float(r.split(",")[2]) for r in numeric.splitlines()[1:]]
    ratio = [a / b for a, b in zip(n, c)]
    assert max(ratio) - min(ratio) < 1e-6 * abs(ratio[0])


def test_demo_bundle_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(capsys, "demo", "criterion-13", "--out", str(a))[0] == 0
    assert run(capsys, "demo", "criterion-13", "--out", str(b))[0] == 0
    for name in ("criterion.json", "criterion.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    assert ma["outputs"] == mb["outputs"] and ma["inputs_hash"] == mb["inputs_hash"]
    assert set(ma["outputs"]) == {"criterion.json", "criterion.csv"}


def test_heisenberg_demo_csv(capsys):
    code, out, _ = run(capsys, "demo", "osc-pulse-heisenberg", "--format", "csv")
    assert code == 0 and len(out.splitlines()) == 21


def test_usage_errors(capsys):
    assert run(capsys, "demo", "nope")[0] == 1
    assert run(capsys, "solve", "--family", "nope")[0] == 1
    assert run(capsys, "solve", "--family", "quintic_pulse", "--param", "k")[0] == 1
    assert run(capsys, "solve", "--family", "quintic_pulse", "--param", "k=abc")[0] == 1
    assert run(capsys, "solve", "--family", "quintic_pulse", "--format", "xml")[0] == 1


@pytest.mark.skipif(shutil.which("nls-frames") is None, reason="console script not installed")
def test_console_script_help():
    r = subprocess.run(["nls-frames", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "kernel" in r.stdout


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "nls_frames.cli", "demo", "criterion-13", "--format", "csv"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("item,value,tol,status,kind")
