from __future__ import annotations

import json

import pytest

from lipschitz_trace.cli import RunConfig, UsageError, dispatch, emit, parse_k_list


def run(capsys, *argv):
    code = dispatch(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_kernel_dim_square(capsys):
    code, out, _ = run(capsys, "kernel-dim", "--domain", "square")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["total_dim"] == 0 and doc["metadata"]["subcommand"] == "kernel-dim"


def test_kernel_dim_angles_in_degrees(capsys):
    code, out, _ = run(capsys, "kernel-dim", "--angles", "90,270,90,90,90,90", "--degrees")
    assert code == 0 and json.loads(out)["result"]["total_dim"] == 1


def test_kernel_dim_excluded_angle_is_a_failed_check(capsys):
    code, out, _ = run(capsys, "kernel-dim", "--domain", "square", "--s", "1")
    assert code == 1
    assert json.loads(out)["result"]["total_dim"] is None


@pytest.mark.parametrize("argv", [
    ["kernel-dim", "--bogus"],
    ["kernel-dim"],
    [],
    ["norms", "--field", "x", "--domain", "square"],
    ["norms", "--field", "harmonic:x", "--domain", "square", "--what", "nope"],
    ["counterexample", "--k", "4,2"],
    ["counterexample", "--k", "1", "--tol", "-1"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_counterexample_csv(capsys):
    code, out, _ = run(capsys, "counterexample", "--k", "1,2,4")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 4 and lines[0].startswith("k,")
    assert [ln.split(",")[0] for ln in lines[1:]] == ["1", "2", "4"]


def test_counterexample_json(capsys):
    code, out, _ = run(capsys, "counterexample", "--k", "1", "--format", "json")
    rows = json.loads(out)["result"]["rows"]
    assert code == 0 and rows[0]["k"] == 1 and "errors" in rows[0]


def test_verify_suites(capsys):
    for suite in ("grisvard", "flux", "poincare"):
        code, out, _ = run(capsys, "verify", "--suite", suite)
        assert code == 0 and json.loads(out)["result"]["passed"] is True


def test_verify_harmonic_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "harmonic", "--mc-samples", "5000")
    assert code == 0
    checks = json.loads(out)["result"]["checks"]
    assert any(c["name"] == "equivalence_spread" for c in checks)


def test_verify_impossible_tolerance_fails(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "flux", "--check-tol", "1e-30")
    assert code == 1 and json.loads(out)["result"]["passed"] is False


def test_norms_json(capsys):
    code, out, _ = run(capsys, "norms", "--field", "harmonic:x", "--domain", "square",
                       "--what", "l2,wgrad,boundary", "--tol", "1e-10")
    assert code == 0
    entries = json.loads(out)["result"]["entries"]
    assert entries["l2"]["value"] == pytest.approx((0.125 / 3 * 0.5) ** 0.5, rel=1e-9)
    assert set(entries) == {"l2", "wgrad", "boundary"}


def test_norms_panel_cap(capsys):
    base = ["norms", "--field", "necas", "--domain", "square", "--what", "whess", "--tol", "1e-12"]
    code, _, err = run(capsys, *base, "--max-panels", "100")
    assert code == 3 and "converge" in err
    assert run(capsys, *base[:-2], "--max-panels", "0")[0] == 2


def test_norms_gagliardo(capsys):
    code, out, _ = run(capsys, "norms", "--field", "harmonic:x", "--domain", "square",
                       "--what", "gagliardo:sigma=0.3", "--mc-samples", "5000", "--seed", "7")
    assert code == 0
    assert json.loads(out)["result"]["entries"]["gagliardo:sigma=0.3"]["stderr"] > 0


def test_emit_is_deterministic(tmp_path):
    cfg = RunConfig("counterexample", format="csv")
    rep = {"columns": ["a", "b"], "rows": [[1, 0.1], [2, float("nan")]]}
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    emit(rep, "csv", str(p1), cfg)
    emit(rep, "csv", str(p2), cfg)
    assert p1.read_bytes() == p2.read_bytes()
    j1, j2 = tmp_path / "a.json", tmp_path / "b.json"
    emit({"x": float("inf")}, "json", str(j1), cfg)
    emit({"x": float("inf")}, "json", str(j2), cfg)
    assert j1.read_bytes() == j2.read_bytes()
    assert json.loads(j1.read_text())["result"]["x"] is None


def test_out_file(tmp_path, capsys):
    path = tmp_path / "kd.json"
    assert dispatch(["kernel-dim", "--domain", "lshape", "--out", str(path)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(path.read_text())["result"]["total_dim"] == 1


def test_parse_k_list():
    assert parse_k_list("1..4096") == [2 ** m for m in range(13)]
    assert parse_k_list("3..20") == [3, 6, 12]
    assert parse_k_list("1, 2,4") == [1, 2, 4]
    for bad in ("a..4", "4..1", "0..2", "1,x"):
        with pytest.raises(UsageError):
            parse_k_list(bad)


def test_run_config_validation():
    for kw in ({"tol": 0.0}, {"mc_samples": 10}, {"format": "xml"}, {"seed": -1}, {"threads": -2}):
        with pytest.raises(UsageError):
            RunConfig("norms", **kw)
