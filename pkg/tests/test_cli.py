import json
import shutil
from pathlib import Path

import pytest
import yaml

from sngen import cli
from sngen.domains import krk

FIXTURES = Path(__file__).parent / "fixtures"


def run(*argv):
    return cli.main([str(a) for a in argv])


def write(path, data):
    path.write_text(yaml.safe_dump(data))
    return path


@pytest.fixture
def krk_config(tmp_path):
    return write(tmp_path / "krk.yaml", {"domain": "krk", "gen": {"iterations": 5, "samples": 30}})


def hypothesis_file(tmp_path, theory_id):
    p = tmp_path / f"{theory_id}.json"
    p.write_text(json.dumps({"kind": "external", "theory_id": theory_id}))
    return p


def test_gen_krk_mock(tmp_path, krk_config):
    out = tmp_path / "out"
    assert run("gen", "--config", krk_config, "--hypothesis", hypothesis_file(tmp_path, "krk-wfw"), "--out-dir", out) == 0
    assert sorted(p.name for p in out.iterdir()) == ["manifest.json", "report.txt", "result.json", "trace.jsonl"]
    trace = [json.loads(line) for line in (out / "trace.jsonl").read_text().splitlines()]
    assert len(trace) == 5
    totals = [r["accepted_total"] for r in trace]
    assert totals == sorted(totals)
    result = json.loads((out / "result.json").read_text())
    assert all(krk.eval_theory(krk.decode(e)) for e in result["accepted"])
    assert result["n"] == 5 and result["s"] == 30


def test_gen_always_false(tmp_path, krk_config):
    out = tmp_path / "out"
    assert run("gen", "--config", krk_config, "--hypothesis", hypothesis_file(tmp_path, "false"), "--out-dir", out) == 0
    result = json.loads((out / "result.json").read_text())
    assert result["accepted"] == [] and result["weight"] == 0


def test_missing_api_key_writes_nothing(tmp_path, monkeypatch):
    monkeypatch.delenv("SNG_ABSENT_KEY", raising=False)
    cfg = write(tmp_path / "c.yaml", {"domain": "krk", "backend": {"kind": "chat", "api_key_env": "SNG_ABSENT_KEY"}})
    out = tmp_path / "out"
    code = run("gen", "--config", cfg, "--hypothesis", hypothesis_file(tmp_path, "krk-wfw"), "--out-dir", out)
    assert code != 0
    assert not out.exists()


def test_bad_config_exits_2(tmp_path):
    cfg = write(tmp_path / "c.yaml", {"domain": "chess960"})
    assert run("genmol", "--config", cfg, "--out-dir", tmp_path / "o") == 2
    assert run("genmol", "--config", tmp_path / "missing.yaml", "--out-dir", tmp_path / "o") == 2
    krk_cfg = write(tmp_path / "k.yaml", {"domain": "krk"})
    assert run("genmol", "--config", krk_cfg, "--out-dir", tmp_path / "o") == 2


def test_genmol_is_byte_identical(tmp_path):
    cfg = FIXTURES / "genmol_single.yaml"
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("genmol", "--config", cfg, "--out-dir", a) == 0
    assert run("genmol", "--config", cfg, "--out-dir", b) == 0
    for name in ("result.json", "trace.jsonl", "manifest.json", "report.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    assert run("genmol", "--config", cfg, "--out-dir", tmp_path / "c", "--seed", 12) == 0
    assert (a / "trace.jsonl").read_bytes() != (tmp_path / "c" / "trace.jsonl").read_bytes()


def test_genmol_replay_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cfg = FIXTURES / "genmol_replay.yaml"
    assert run("genmol", "--config", cfg, "--out-dir", a) == 0
    assert run("genmol", "--config", cfg, "--out-dir", b) == 0
    assert (a / "result.json").read_bytes() == (b / "result.json").read_bytes()
    assert (a / "trace.jsonl").read_bytes() == (b / "trace.jsonl").read_bytes()


def test_theta_infinity_reports_root_rejected(tmp_path):
    out = tmp_path / "o"
    assert run("genmol", "--config", FIXTURES / "genmol_single.yaml", "--out-dir", out, "--theta", "inf") == 0
    assert json.loads((out / "result.json").read_text())["stop_reason"] == "RootRejected"
    assert "RootRejected" in (out / "report.txt").read_text()


def test_defaults_applied_and_flags_override(tmp_path):
    cfg, _ = cli.load_config(None, {})
    assert cfg["search"]["n_candidates"] == 10 and cfg["search"]["gen_iterations"] == 10
    bounds = {f["name"]: (f["lo"], f["hi"]) for f in cfg["factors"]}
    assert bounds == {"affinity": (3.0, 10.0), "molwt": (200.0, 700.0), "sas": (0.0, 7.0)}
    path = write(tmp_path / "c.yaml", {"seed": 4, "search": {"max_steps": 3}})
    cfg, _ = cli.load_config(str(path), {"seed": 9})
    assert cfg["seed"] == 9 and cfg["search"]["max_steps"] == 3 and cfg["search"]["gen_samples"] == 10


def test_manifest_contents(tmp_path):
    out = tmp_path / "o"
    assert run("genmol", "--config", FIXTURES / "genmol_single.yaml", "--out-dir", out, "--steps", 1) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 11 and manifest["code_version"]
    assert manifest["config"]["search"]["max_steps"] == 1
    assert manifest["config_digest"] == cli.config_digest(manifest["config"])
    report = (out / "report.txt").read_text()
    assert "affinity: [" in report and "|support| =" in report and "theta_hat chain:" in report


def test_example_files_relative_to_config(tmp_path):
    shutil.copy(FIXTURES / "genmol_single.yaml", tmp_path / "c.yaml")
    (tmp_path / "pos.txt").write_text("NCC(=O)OS\nSSNNOO\n")
    cfg = yaml.safe_load((tmp_path / "c.yaml").read_text())
    cfg["examples"] = {"positives": "pos.txt", "n_negatives": 2, "n_unlabelled": 100}
    write(tmp_path / "c.yaml", cfg)
    assert run("genmol", "--config", tmp_path / "c.yaml", "--out-dir", tmp_path / "o", "--steps", 1) == 0


def test_krk_export_and_verify(tmp_path, capsys):
    assert run("krk", "export", "--out-dir", tmp_path) == 0
    lines = (tmp_path / "krk_canonical.csv").read_text().splitlines()
    assert len(lines) - 1 == 28056
    assert [p.name for p in tmp_path.iterdir()] == ["krk_canonical.csv"]
    capsys.readouterr()
    assert run("krk", "verify") == 0
    assert "wfw=27" in capsys.readouterr().out


def test_krk_verify_tampered_oracle(monkeypatch):
    monkeypatch.setattr(krk, "is_checkmate", lambda p: krk.in_check(p))
    assert run("krk", "verify") != 0
