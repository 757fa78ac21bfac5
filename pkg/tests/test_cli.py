import json

import pytest

from rqmc.cli import main


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


def test_points_shift_no_shift(tmp_path):
    out = tmp_path / "run"
    rc = main(["points", "--scheme", "shift", "--s", "1", "--m", "2",
               "--seed", "1", "--no-shift", "--out", str(out)])
    assert rc == 0
    lines = read(out / "data.csv").decode().splitlines()
    assert lines[0].startswith("# {")
    assert lines[1] == "x1"
    assert lines[2:] == ["0.0", "0.5", "0.25", "0.75"]
    assert (out / "net.json").exists() and (out / "manifest.json").exists()


def test_points_row_count_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        main(["points", "--scheme", "rls", "--s", "2", "--m", "5",
              "--seed", "7", "--out", str(out)])
    assert read(a / "data.csv") == read(b / "data.csv")
    assert read(a / "net.json") == read(b / "net.json")
    lines = read(a / "data.csv").decode().splitlines()
    assert len(lines) == 2 + 32  # json header + csv header + 2^m rows


def test_points_missing_direction_file(tmp_path):
    with pytest.raises(SystemExit) as err:
        main(["points", "--scheme", "rls", "--s", "1", "--m", "3",
              "--seed", "1", "--dirs", str(tmp_path / "absent.txt"),
              "--out", str(tmp_path / "out")])
    assert err.value.code == 2


def test_interval_report(tmp_path, capsys):
    rc = main(["interval", "--integrand", "x33exp", "--scheme", "rls",
               "--m", "6", "--E", "64", "--r", "9", "--ell", "2", "--u", "8",
               "--method", "quantile", "--seed", "3",
               "--out", str(tmp_path / "iv")])
    assert rc == 0
    report = json.loads(read(tmp_path / "iv" / "report.json"))
    assert report["nominal"] == 0.9609375
    assert len(report["replicates"]) == 9
    assert report["interval"]["lo"] <= report["interval"]["hi"]
    assert isinstance(report["hit"], bool)


def test_interval_t_records_multiplier(tmp_path):
    main(["interval", "--integrand", "x33exp", "--m", "6", "--r", "9",
          "--ell", "2", "--u", "8", "--method", "t", "--seed", "3",
          "--out", str(tmp_path / "iv")])
    report = json.loads(read(tmp_path / "iv" / "report.json"))
    assert abs(report["t_multiplier"] - 2.46) < 0.005


def test_interval_r1_usage_error(tmp_path):
    with pytest.raises(SystemExit) as err:
        main(["interval", "--integrand", "x33exp", "--m", "4", "--r", "1",
              "--ell", "1", "--u", "1", "--seed", "1"])
    assert err.value.code == 2


def test_experiment_sign_curve_schema_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        rc = main(["experiment", "--fig", "sign-curve", "--integrand", "x33exp",
                   "--scheme", "both", "--m-range", "1:3", "--trials", "200",
                   "--seed", "11", "--out", str(out)])
        assert rc == 0
    assert read(a / "data.csv") == read(b / "data.csv")
    lines = read(a / "data.csv").decode().splitlines()
    assert lines[1] == "m,scheme,p_gt,p_eq,stderr,trials"
    assert len(lines) == 2 + 2 * 3  # two schemes, three sizes
    cfg = json.loads(read(a / "config.json"))
    assert cfg["fig"] == "sign-curve" and cfg["seed"] == 11


def test_experiment_coverage_schema(tmp_path):
    out = tmp_path / "cov"
    main(["experiment", "--fig", "coverage", "--integrand", "x33exp",
          "--scheme", "rls", "--m-range", "5", "--r", "5", "--ell", "1",
          "--u", "5", "--trials", "40", "--seed", "13", "--E", "32",
          "--boot-samples", "200", "--out", str(out)])
    lines = read(out / "data.csv").decode().splitlines()
    assert lines[1] == "m,scheme,method,hits,trials,nominal"
    rows = [ln.split(",") for ln in lines[2:]]
    assert {r[2] for r in rows} == {"quantile", "t", "bootstrap_t"}
    for r in rows:
        assert 0 <= int(r[3]) <= 40


def test_experiment_robot_lengths_schema(tmp_path):
    out = tmp_path / "rob"
    main(["experiment", "--fig", "robot-lengths", "--integrand", "robotarm",
          "--scheme", "rls", "--m-range", "6", "--r", "5", "--ell", "1",
          "--u", "5", "--trials", "5", "--seed", "17", "--E", "32",
          "--boot-samples", "200", "--out", str(out)])
    lines = read(out / "data.csv").decode().splitlines()
    assert lines[1] == "method,trial,length,hit"
    assert len(lines) == 2 + 3 * 5


def test_experiment_unknown_fig(tmp_path):
    with pytest.raises(SystemExit):
        main(["experiment", "--fig", "nope", "--seed", "1",
              "--out", str(tmp_path / "x")])


def test_diagnose_zprob_strict_pass(tmp_path):
    out = tmp_path / "z"
    rc = main(["diagnose", "--check", "zprob", "--scheme", "crd", "--s", "1",
               "--m", "6", "--E", "32", "--trials", "20000", "--count", "3",
               "--seed", "19", "--strict", "--out", str(out)])
    assert rc == 0
    lines = read(out / "data.csv").decode().splitlines()
    assert lines[1] == "k,m,p_hat,stderr,expected,z,verdict"
    assert all(ln.endswith("pass") for ln in lines[2:])


def test_diagnose_marginal_strict_failure_exit_code(tmp_path):
    rc = main(["diagnose", "--check", "marginal", "--scheme", "shift",
               "--s", "1", "--m", "4", "--E", "8", "--trials", "400",
               "--seed", "23", "--strict", "--out", str(tmp_path / "m")])
    assert rc == 1


def test_diagnose_rankdef(tmp_path, capsys):
    rc = main(["diagnose", "--check", "rankdef", "--s", "2", "--m", "8",
               "--seed", "29", "--out", str(tmp_path / "r")])
    assert rc == 0
    outp = capsys.readouterr().out
    assert "R_{m,1}" in outp
    lines = read(tmp_path / "r" / "data.csv").decode().splitlines()
    assert lines[1] == "s,m,R_m1"
    val = float(lines[2].split(",")[2])
    assert val >= 0.0


def test_diagnose_xor_closure_and_kappa(tmp_path):
    main(["diagnose", "--check", "xor-closure", "--s", "1", "--N", "3",
          "--trials", "4000", "--seed", "31", "--out", str(tmp_path / "x")])
    lines = read(tmp_path / "x" / "data.csv").decode().splitlines()
    assert lines[1] == "s,N,trials,p_hat"
    p = float(lines[2].split(",")[3])
    assert 0.3 < p < 0.45
    main(["diagnose", "--check", "kappa", "--s", "1", "--N", "12",
          "--trials", "4000", "--seed", "37", "--out", str(tmp_path / "k")])
    lines = read(tmp_path / "k" / "data.csv").decode().splitlines()
    assert lines[1] == "size,count,ratio"


def test_manifest_records_direction_hash(tmp_path):
    out = tmp_path / "p"
    main(["points", "--scheme", "rls", "--s", "1", "--m", "4", "--seed", "41",
          "--out", str(out)])
    manifest = json.loads(read(out / "manifest.json"))
    assert "directions" in manifest and len(manifest["directions"]) == 64


def test_env_direction_override(tmp_path, monkeypatch):
    p = tmp_path / "mini.txt"
    p.write_text("d s a m_i\n2 1 0 1\n")
    monkeypatch.setenv("RQMC_DIRECTION_FILE", str(p))
    out = tmp_path / "run"
    main(["points", "--scheme", "shift", "--s", "2", "--m", "3", "--seed", "1",
          "--no-shift", "--out", str(out)])
    cfg = json.loads(read(out / "config.json"))
    assert cfg["directions"] == "mini.txt"
