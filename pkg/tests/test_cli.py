import json
import subprocess
import sys

import numpy as np
import pytest

from permanental import matio

CLI = [sys.executable, "-m", "permanental.cli"]


def run_cli(*args, **kw):
    return subprocess.run(
        CLI + [str(a) for a in args], capture_output=True, text=True, **kw
    )


@pytest.fixture(scope="module")
def kernel_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "kernel.json"
    out = run_cli("gen-kernel", "--n", 3, "--seed", 5, "--kill-min", 0.6,
                  "--out", path)
    assert out.returncode == 0, out.stderr
    return str(path)


@pytest.fixture(scope="module")
def spec_file(tmp_path_factory, kernel_file):
    path = tmp_path_factory.mktemp("cli") / "spec.json"
    matio.save_spec_file(str(path), 1.0, kernel=matio.load_matrix(kernel_file))
    return str(path)


def test_validate_kernel_report(kernel_file):
    out = run_cli("validate-kernel", kernel_file)
    assert out.returncode == 0
    report = json.loads(out.stdout)
    assert report["passed"] is True
    assert report["positive_row_sums"] is True


def test_validate_kernel_rejects_non_m(tmp_path):
    bad = tmp_path / "bad.json"
    matio.save_matrix(str(bad), [[1.0, 2.0], [2.0, 1.0]])
    out = run_cli("validate-kernel", str(bad))
    assert out.returncode == 2
    assert json.loads(out.stdout)["passed"] is False


def test_corrupted_spec_exits_2(tmp_path):
    spec = tmp_path / "spec.json"
    matio.save_spec_file(str(spec), 1.0, a_matrix=[[1.0, 0.5], [0.0, 1.0]])
    out = run_cli("laplace", "--spec", str(spec), "--s", "1,1")
    assert out.returncode == 2
    assert "error" in out.stderr


def test_laplace_methods_agree_within_printed_rel_err(spec_file):
    det = json.loads(run_cli("laplace", "--spec", spec_file, "--s", "1,0.5,2").stdout)
    ser = json.loads(
        run_cli("laplace", "--spec", spec_file, "--s", "1,0.5,2",
                "--method", "series", "--rel-tol", "1e-9").stdout
    )
    assert ser["terms_used"] > 0
    tol = max(ser["rel_err"], 1e-12) * abs(det["value"]) + 1e-14
    assert abs(det["value"] - ser["value"]) <= 4 * tol + 1e-9 * abs(det["value"])


def test_sample_deterministic_bytes(spec_file, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        out = run_cli("sample", "--spec", spec_file, "--n", 50, "--seed", 1,
                      "--couple", "--out", path)
        assert out.returncode == 0, out.stderr
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header == "X_1,X_2,X_3,L_1,L_2,L_3,Z_1,Z_2,Z_3"


def test_sample_worker_invariance(spec_file, tmp_path):
    a, b = tmp_path / "w1.csv", tmp_path / "w4.csv"
    run_cli("sample", "--spec", spec_file, "--n", 400, "--seed", 9,
            "--workers", 1, "--out", a)
    run_cli("sample", "--spec", spec_file, "--n", 400, "--seed", 9,
            "--workers", 4, "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_z_dist_output(spec_file):
    out = run_cli("z-dist", "--spec", spec_file, "--target-mass", "0.9999")
    payload = json.loads(out.stdout)
    assert payload["covered_mass"] + payload["tail_bound"] >= 1 - 1e-9
    zero = [m for m in payload["masses"] if m["k"] == [0, 0, 0]]
    assert zero and zero[0]["mass"] > 0


def test_gamma_tail_with_bounds():
    out = run_cli("gamma-tail", "--u", 2, "--v", 1, "--t", 5, "--bounds")
    payload = json.loads(out.stdout)
    assert payload["bounds"]["lower"] <= payload["tail"] <= payload["bounds"]["upper"]


def test_gamma_tail_bounds_precondition_exit(tmp_path):
    out = run_cli("gamma-tail", "--u", 5, "--v", 1, "--t", 1, "--bounds")
    assert out.returncode == 2


def test_permanent_command(tmp_path):
    m = tmp_path / "m.json"
    matio.save_matrix(str(m), np.eye(3))
    payload = json.loads(run_cli("permanent", "--matrix", m, "--alpha", 2).stdout)
    assert payload["value"] == pytest.approx(8.0)


def test_bounds_simple(kernel_file):
    payload = json.loads(run_cli("bounds", "--kernel", kernel_file,
                                 "--which", "simple").stdout)
    assert all(a <= b * (1 + 1e-10)
               for a, b in zip(payload["diag_a"], payload["bounds"]))


def test_bounds_psi_star(kernel_file):
    payload = json.loads(run_cli("bounds", "--kernel", kernel_file,
                                 "--which", "psi-star", "--p", 1).stdout)
    assert payload["psi_star"] == pytest.approx(max(payload["diag_a"]), rel=1e-10)


def test_unbounded_scan_csv():
    out = run_cli("unbounded-scan", "--kernel-model", "brownian",
                  "--n", "4,8,16", "--delta", 0.5)
    lines = out.stdout.strip().splitlines()
    assert lines[0] == "delta,n,psi_star,log_n_over_psi_star,sigma_star2_log_n,error"
    assert len(lines) == 4


def test_classify_command():
    payload = json.loads(run_cli("classify", "--gamma", -0.5, "--p", 0.8).stdout)
    assert payload["label"] == "unbounded-by-Thm1.6"


def test_levy_scan_thm16_csv():
    out = run_cli("levy", "--p", 0.8, "--gamma", -0.5,
                  "--scan-thm16", "100,10000")
    lines = out.stdout.strip().splitlines()
    assert lines[0] == "n,statistic,log_n,ratio"
    assert len(lines) == 3


def test_mc_validate_small(spec_file):
    out = run_cli("mc-validate", "--spec", spec_file, "--n", 20000, "--seed", 3,
                  "--s-points", 4)
    payload = json.loads(out.stdout)
    assert payload["coupling_violations"] == 0
    assert payload["points_within_4se"] >= 3
    assert payload["inequality"]["diff_mean"] >= -4 * payload["inequality"]["diff_se"]


def test_json_outputs_byte_identical(spec_file, kernel_file):
    for args in (
        ["laplace", "--spec", spec_file, "--s", "0.5,1,2", "--method", "series"],
        ["z-dist", "--spec", spec_file, "--target-mass", "0.999"],
        ["validate-kernel", kernel_file],
        ["gamma-tail", "--u", 1.5, "--v", 2, "--t", 3],
        ["classify", "--gamma", 0.0, "--delta", 3.0, "--p", 0.8],
    ):
        first = run_cli(*args)
        second = run_cli(*args)
        assert first.stdout == second.stdout
        assert first.returncode == second.returncode


def test_levy_u_command_fast_lag():
    out = run_cli("levy", "--p", 0.5, "--gamma", 2.0, "--u", 0.05)
    payload = json.loads(out.stdout)
    assert payload["u_plus"] == payload["u_minus"]  # symmetric model
    assert payload["u_zero"] > payload["u_plus"]
    assert payload["quad_err"] < 1e-3


def test_levy_kernel_points_command(tmp_path):
    points = tmp_path / "points.json"
    points.write_text('{"points": [0.0, 0.05]}')
    out = run_cli("levy", "--p", 0.5, "--gamma", 2.0, "--kernel", points)
    assert out.returncode == 0, out.stderr
    payload = json.loads(out.stdout)
    rows = payload["kernel"]["rows"]
    assert rows[0][0] == pytest.approx(rows[1][1])
    assert rows[0][1] == pytest.approx(rows[1][0])
    assert payload["quad_err"] < 1e-3
