import json
import shutil
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from artin_iwasawa.cli import main

DATA = resources.files("artin_iwasawa.data")
SCHEMAS = resources.files("artin_iwasawa.schemas")


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def schema(name: str) -> dict:
    return json.loads(SCHEMAS.joinpath(f"{name}.schema.json").read_text())


def write_config(path: Path, data: dict) -> str:
    path.write_text(json.dumps(data))
    return str(path)


# exit codes and configuration


def test_verify_without_suite_is_usage_error():
    assert main(["verify"]) == 2


def test_empty_suite_selection(workdir):
    cfg = write_config(workdir / "c.json", {"version": "1", "suites": []})
    assert main(["verify", "--config", cfg]) == 2


def test_schema_rejects_bad_prime():
    assert main(["verify", "coleman", "--p", "4"]) == 2


def test_missing_unit_file(workdir):
    cfg = write_config(workdir / "c.json", {"version": "1", "suites": ["ezc"],
                                            "ezc": {"unit_data": "missing.json"}})
    assert main(["verify", "--config", cfg]) == 2


def test_invalid_config_json(workdir):
    (workdir / "bad.json").write_text("{")
    assert main(["verify", "all", "--config", str(workdir / "bad.json")]) == 2


def test_odd_character_in_lp_is_computation_error():
    assert main(["eval", "lp", "--char", "mod3_odd", "--p", "5", "--s", "-1"]) == 3


# verify


def test_verify_coleman_report(workdir, capsys):
    assert main(["verify", "coleman", "--p", "3", "--depth", "3", "--out", "r.json"]) == 0
    report = json.loads((workdir / "r.json").read_text())
    jsonschema.validate(report, schema("report"))
    checks = report["suites"]["coleman"]["checks"]
    names = {c["name"] for c in checks}
    assert any(n.startswith("f(zeta_3-1)") for n in names)
    assert any(n.startswith("prod_i f(zeta_1^i") for n in names)
    assert any(n.startswith("special value") for n in names)
    assert "extended constant term" in names
    assert "extended map independent of gamma power" in names
    assert all(c["pass"] for c in checks)
    out = capsys.readouterr().out
    assert "ALL PASS" in out and out.count("PASS coleman:") == len(checks)


def test_verify_ex_records_constant(workdir, capsys):
    assert main(["verify", "ex", "--char", "mod12_quadratic", "--p", "5"]) == 0
    report = json.loads((workdir / "report_ex.json").read_text())
    assert report["suites"]["ex"]["matched_constant"] == "-2^1"
    assert "ex matched constant: -2^1" in capsys.readouterr().out


def test_verify_deterministic(workdir):
    a = main(["verify", "coleman", "--p", "3", "--depth", "2", "--out", "a.json"])
    b = main(["verify", "coleman", "--p", "3", "--depth", "2", "--out", "b.json"])
    assert a == b == 0
    assert (workdir / "a.json").read_bytes() == (workdir / "b.json").read_bytes()


def test_seed_policy_recorded(workdir, monkeypatch):
    monkeypatch.setenv("IWF_SEED_POLICY", "largest")
    assert main(["verify", "coleman", "--p", "3", "--depth", "2", "--out", "r.json"]) == 0
    report = json.loads((workdir / "r.json").read_text())
    assert "largest" in json.dumps(report["conventions"])


# eval


def test_eval_lp(workdir, capsys):
    assert main(["eval", "lp", "--char", "mod12_quadratic", "--s", "-1", "--p", "5",
                 "--out", "lp.json"]) == 0
    out = capsys.readouterr().out
    assert "244140601 + O(5^12)" in out
    assert (workdir / "lp.json").is_file()


def test_eval_linv_e0(capsys):
    assert main(["eval", "linv", "--char", "mod12_quadratic", "--p", "5"]) == 0
    assert "L-invariant = 1 + O(5^12)" in capsys.readouterr().out


def test_eval_regulator_degenerate(capsys):
    units = str(DATA.joinpath("units_degenerate.json"))
    for side in ("p", "inf"):
        assert main(["eval", "regulator", "--side", side, "--units", units]) == 0
        assert "zero at precision" in capsys.readouterr().out


def test_eval_measure_json(workdir):
    assert main(["eval", "measure", "--char", "mod12_quadratic", "--p", "5", "--mmax", "2",
                 "--out", "m.json"]) == 0
    data = json.loads((workdir / "m.json").read_text())
    measure = data["measure"] if "measure" in data else data
    assert {"prime", "coeff_ring", "m_max", "levels", "precision"} <= set(measure)


# goldens


def _golden_copy(workdir) -> Path:
    dest = workdir / "goldens"
    shutil.copytree(str(DATA.joinpath("goldens")), dest)
    return dest


def test_goldens_check_shipped(capsys):
    assert main(["goldens", "check"]) == 0
    assert capsys.readouterr().out.count("OK ") == 6


def test_goldens_corrupted(workdir, capsys):
    gdir = _golden_copy(workdir)
    target = gdir / "lp_mod12_p5_s-1.json"
    target.write_text(target.read_text().replace("244140601", "244140602"))
    code = main(["goldens", "check", "--dir", str(gdir), "--only", "lp_mod12_p5_s-1",
                 "--diff-dir", str(workdir / "diffs")])
    assert code == 1
    err = capsys.readouterr().err
    assert "MISMATCH lp_mod12_p5_s-1: diff at" in err
    diff = (workdir / "diffs" / "lp_mod12_p5_s-1.diff").read_text()
    assert "-" in diff and "244140602" in diff


def test_goldens_update_then_check(workdir):
    gdir = _golden_copy(workdir)
    (gdir / "linv_mod11_p5.json").write_text("stale\n")
    args = ["--dir", str(gdir), "--only", "linv_mod11_p5"]
    assert main(["goldens", "check", *args, "--diff-dir", str(workdir / "d")]) == 1
    assert main(["goldens", "update", *args]) == 0
    assert main(["goldens", "check", *args]) == 0


def test_goldens_unknown_name():
    assert main(["goldens", "check", "--only", "nope"]) == 2
