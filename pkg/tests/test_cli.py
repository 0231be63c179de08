"""End-to-end command-line checks through subprocesses."""

import json
import os
import shutil
import subprocess
import sys

import pytest

from expsums.cli import _write_csv

REF_INTERVAL_101 = 2.859870343104319


def run_cli(*args, env_extra=None, cwd=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "expsums", *args],
                          capture_output=True, text=True, env=env, cwd=cwd)


def load_report(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def stripped(path):
    """Report bytes with the volatile metadata removed."""
    obj = load_report(path)
    obj.pop("meta", None)
    return json.dumps(obj, sort_keys=True)


def test_gen_gap_exact(tmp_path):
    out = tmp_path / "gap.json"
    r = run_cli("gen", "--kind", "gap", "--params",
                '{"a":1,"b":10,"M":3,"N":2}', "--output", str(out))
    assert r.returncode == 0, r.stderr
    rep = load_report(out)
    assert rep["result"]["set"]["elements"] == [11, 12, 13, 21, 22, 23]
    assert rep["config"]["command"] == "gen"
    assert set(rep["meta"]) == {"timestamp", "walltime", "backend"}


def test_gen_validates_certificates(tmp_path):
    out = tmp_path / "z.json"
    r = run_cli("gen", "--kind", "zstrong-random", "--params",
                '{"sizes":[3,4]}', "--seed", "5", "--output", str(out))
    assert r.returncode == 0, r.stderr
    rep = load_report(out)
    assert rep["result"]["validation"]["ok"] is True
    assert rep["result"]["certificate"]["flavor"] == "integer"


def test_gen_bad_params_is_usage_error(tmp_path):
    r = run_cli("gen", "--kind", "gap", "--params", "1,2,3,4",
                "--output", str(tmp_path / "x.json"))
    assert r.returncode == 2
    assert "JSON" in r.stderr


def test_gen_unknown_kind_is_usage_error(tmp_path):
    r = run_cli("gen", "--kind", "nonsense",
                "--output", str(tmp_path / "x.json"))
    assert r.returncode == 2


def test_gen_collision_reported_as_usage_error(tmp_path):
    r = run_cli("gen", "--kind", "gap", "--params",
                '{"a":2,"b":4,"M":3,"N":2,"force":true}',
                "--output", str(tmp_path / "x.json"))
    assert r.returncode == 2
    assert "colliding" in r.stderr.lower()


def test_norm_interval_contains_reference(tmp_path):
    out = tmp_path / "n.json"
    r = run_cli("norm", "--set", "interval:101", "--rel-err", "0.05",
                "--output", str(out))
    assert r.returncode == 0, r.stderr
    enc = load_report(out)["result"]
    assert enc["lo"] <= REF_INTERVAL_101 <= enc["hi"]


def test_norm_bad_spec_is_usage_error(tmp_path):
    r = run_cli("norm", "--set", "pentagon:9",
                "--output", str(tmp_path / "n.json"))
    assert r.returncode == 2


def test_norm_memory_budget_exit_code(tmp_path):
    r = run_cli("norm", "--set", "interval:2000",
                "--output", str(tmp_path / "n.json"),
                env_extra={"EXPSUMS_MEMORY_BUDGET": "1000"})
    assert r.returncode == 3
    assert "budget" in r.stderr.lower()


def test_kernel_csv_golden(tmp_path):
    out = tmp_path / "k.csv"
    r = run_cli("kernel", "--m", "3", "--n", "10", "--output", str(out))
    assert r.returncode == 0, r.stderr
    lines = out.read_text().splitlines()
    assert lines[0] == "k,value_exact,value_float"
    assert lines[1].startswith("-15,1/9,")
    assert len(lines) == 32  # header + 31 stored values


def test_thin_chain(tmp_path):
    gen_out = tmp_path / "z.json"
    r = run_cli("gen", "--kind", "zstrong-box", "--params",
                '{"sizes":[8,8],"stretch":2.0}', "--output", str(gen_out))
    assert r.returncode == 0, r.stderr
    cert = load_report(gen_out)["result"]["certificate"]

    thin_out = tmp_path / "t.json"
    r = run_cli("thin", "--input", str(gen_out), "--d1", str(cert["d1"]),
                "--d2", str(cert["d2"]), "--delta", "1.0", "--q", "4",
                "--s", "1", "--output", str(thin_out))
    assert r.returncode == 0, r.stderr
    res = load_report(thin_out)["result"]
    assert res["kept_blocks"] == [1, 5]
    assert res["terms_out"] < res["terms_in"]

    # the thinned polynomial feeds straight back into norm
    norm_out = tmp_path / "tn.json"
    r = run_cli("norm", "--input", str(thin_out), "--output", str(norm_out))
    assert r.returncode == 0, r.stderr
    assert load_report(norm_out)["result"]["lo"] > 0


def test_thin_hypothesis_violation_is_usage_error(tmp_path):
    r = run_cli("thin", "--set", "interval:20", "--d1", "2", "--d2", "7",
                "--delta", "1.0", "--q", "4", "--s", "0",
                "--output", str(tmp_path / "t.json"))
    assert r.returncode == 2
    assert "hypothesis" in r.stderr.lower()


def test_verify_mps_pass_and_fail(tmp_path):
    r = run_cli("verify", "--theorem", "mps", "--set", "interval:101",
                "--output", str(tmp_path / "v.json"))
    assert r.returncode == 0, r.stderr

    r = run_cli("verify", "--theorem", "mps", "--set", "interval:101",
                "--c-mps", "10.0", "--output", str(tmp_path / "v2.json"))
    assert r.returncode == 1
    assert load_report(tmp_path / "v2.json")["result"]["passed"] is False

    r = run_cli("verify", "--theorem", "mps", "--set", "interval:101",
                "--c-mps", "10.0", "--no-fail",
                "--output", str(tmp_path / "v3.json"))
    assert r.returncode == 0


def test_verify_mps_scan_writes_csv(tmp_path):
    out = tmp_path / "scan.json"
    csv_out = tmp_path / "scan.csv"
    r = run_cli("verify", "--theorem", "mps", "--count", "2",
                "--csv", str(csv_out), "--output", str(out))
    assert r.returncode == 0, r.stderr
    res = load_report(out)["result"]
    assert res["min_ratio"] >= 0.25
    lines = csv_out.read_text().splitlines()
    assert lines[0] == "label,ratio,lhs_lo,lhs_hi,rhs_raw"
    assert len(lines) == res["count"] + 1


def test_verify_multidim_with_generated_input(tmp_path):
    gen_out = tmp_path / "box.json"
    r = run_cli("gen", "--kind", "lattice-box", "--params",
                '{"sizes":[8,8]}', "--output", str(gen_out))
    assert r.returncode == 0, r.stderr
    r = run_cli("verify", "--theorem", "multidim", "--input", str(gen_out),
                "--output", str(tmp_path / "v.json"))
    assert r.returncode == 0, r.stderr
    assert load_report(tmp_path / "v.json")["result"]["certified"] is True


def test_verify_main_prop_default(tmp_path):
    r = run_cli("verify", "--theorem", "main-prop",
                "--output", str(tmp_path / "v.json"))
    assert r.returncode == 0, r.stderr
    res = load_report(tmp_path / "v.json")["result"]
    assert res["passed"] is True


def test_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ("verify", "--theorem", "thinning", "--count", "3",
            "--seed", "99")
    assert run_cli(*args, "--output", str(a)).returncode == 0
    assert run_cli(*args, "--output", str(b)).returncode == 0
    assert stripped(a) == stripped(b)

    c = tmp_path / "c.json"
    assert run_cli("verify", "--theorem", "thinning", "--count", "3",
                   "--seed", "100", "--output", str(c)).returncode == 0
    assert stripped(a) != stripped(c)


def test_gen_random_seed_determinism(tmp_path):
    a, b, c = (tmp_path / n for n in ("a.json", "b.json", "c.json"))
    base = ("gen", "--kind", "lattice-random", "--params", '{"sizes":[4,4]}')
    run_cli(*base, "--seed", "7", "--output", str(a))
    run_cli(*base, "--seed", "7", "--output", str(b))
    run_cli(*base, "--seed", "8", "--output", str(c))
    assert stripped(a) == stripped(b)
    assert stripped(a) != stripped(c)


def test_config_file_merges_under_flags(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"rel_err": 0.02, "seed": 31}))
    out = tmp_path / "n.json"
    r = run_cli("norm", "--set", "interval:20", "--config", str(cfg),
                "--output", str(out))
    assert r.returncode == 0, r.stderr
    echoed = load_report(out)["config"]
    assert echoed["rel_err"] == 0.02
    assert echoed["seed"] == 31

    # explicit flag wins over the file
    r = run_cli("norm", "--set", "interval:20", "--config", str(cfg),
                "--rel-err", "0.3", "--output", str(out))
    assert load_report(out)["config"]["rel_err"] == 0.3


def test_write_csv_empty_rows_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    _write_csv(str(path), [("col_a", "col_b")])
    assert path.read_text().splitlines() == ["col_a,col_b"]


def test_console_script_entry_point():
    exe = shutil.which("expsums")
    if exe is None:
        pytest.skip("console script not on PATH")
    r = subprocess.run([exe, "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for sub in ("gen", "norm", "kernel", "thin", "verify", "suite"):
        assert sub in r.stdout


def test_suite_help_lists_fault_flag():
    r = run_cli("suite", "--help")
    assert r.returncode == 0
    assert "--inject-kernel-fault" in r.stdout
    assert "--skip-determinism" in r.stdout
