from __future__ import annotations

import csv
import json

import pytest
import yaml

from tetris_syk import config as cfgmod
from tetris_syk.cli import EXIT_CAPABILITY, EXIT_OK, EXIT_VALIDATION, main
from tetris_syk.experiments import COLUMNS, PROVENANCE

SMALL = {
    "loschmidt_scan": {"times": [0.2, 0.5], "circuits": 300},
    "variance_study": {
        "syk": {"n_majorana": 8}, "circuits": 100, "ensemble_size": 2,
        "options": {"shots_list": [1, 4], "angle_scales": [1.0]},
    },
    "angle_sweep": {"circuits": 200, "options": {"factors": [1.0, 1.5]}},
    "lgae_hardware_protocol": {"syk": {"n_majorana": 8}, "times": [0.3, 0.6], "circuits": 100, "ensemble_size": 2},
    "noise_model_overlay": {"times": [0.2, 0.4, 0.6], "circuits": 200, "ensemble_size": 2, "options": {"grid_steps": 40}},
    "trotter_crossover": {"times": [0.5, 1.0], "ensemble_size": 2},
    "mirror_sweep": {"syk": {"n_majorana": 8}, "circuits": 40, "ensemble_size": 2, "options": {"p_dep_list": [0.0, 1e-3]}},
    "resources": {},
}


def write(tmp_path, body, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(body))
    return str(p)


def run(tmp_path, kind, body, out="out", *extra):
    return main([kind, "--config", write(tmp_path, body), "--out", str(tmp_path / out), "--quiet", *extra])


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize("kind", cfgmod.KINDS)
def test_defaults_validate(kind):
    cfg = cfgmod.validate({}, kind)
    assert cfg["experiment"] == kind and cfg["schema_version"] == cfgmod.SCHEMA_VERSION


@pytest.mark.parametrize(
    "kind, body, path",
    [
        ("loschmidt_scan", {"times": []}, "times"),
        ("loschmidt_scan", {"bogus": 1}, "bogus"),
        ("loschmidt_scan", {"syk": {"n_majorana": 9}}, "syk.n_majorana"),
        ("loschmidt_scan", {"syk": {"nmajorana": 8}}, "syk.nmajorana"),
        ("loschmidt_scan", {"noise": {"mode": "loud"}}, "noise.mode"),
        ("loschmidt_scan", {"circuits": 0}, "circuits"),
        ("loschmidt_scan", {"schema_version": 7}, "schema_version"),
        ("loschmidt_scan", {"experiment": "angle_sweep"}, "experiment"),
        ("loschmidt_scan", {"options": {"factors": [1.0]}}, "options.factors"),
        ("lgae_hardware_protocol", {"options": {"alpha": 1.5}}, "options.alpha"),
    ],
)
def test_validation_errors_name_the_field(kind, body, path):
    with pytest.raises(cfgmod.ConfigError) as exc:
        cfgmod.validate(body, kind)
    assert exc.value.path == path


@pytest.mark.parametrize("body", [{"times": []}, {"typo_key": 3}])
def test_cli_validation_exit_code(tmp_path, body):
    assert run(tmp_path, "loschmidt_scan", body) == EXIT_VALIDATION


def test_cli_bad_yaml(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("times: [0.1,\n")
    assert main(["loschmidt_scan", "--config", str(p), "--quiet"]) == EXIT_VALIDATION


def test_cli_capability_exit_code(tmp_path):
    assert run(tmp_path, "loschmidt_scan", {"syk": {"n_majorana": 40}}) == EXIT_CAPABILITY


def test_print_config(tmp_path, capsys):
    assert main(["angle_sweep", "--print-config"]) == EXIT_OK
    cfg = json.loads(capsys.readouterr().out)
    assert cfg["experiment"] == "angle_sweep"


@pytest.mark.parametrize("kind", cfgmod.KINDS)
def test_every_kind_runs(tmp_path, kind, capsys):
    assert run(tmp_path, kind, SMALL[kind]) == EXIT_OK
    out = tmp_path / "out"
    rows = read_rows(out / "results.csv")
    assert rows
    with open(out / "results.csv") as fh:
        assert next(csv.reader(fh)) == COLUMNS[kind]
    assert set(PROVENANCE) <= set(rows[0])
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "complete" and "code_version" in manifest
    summary = json.loads((out / "summary.json").read_text())
    assert summary["experiment"] == kind


def test_loschmidt_scan_points_within_5_sigma(tmp_path):
    body = {"times": [0.2, 0.5, 0.8], "circuits": 10_000}
    assert run(tmp_path, "loschmidt_scan", body) == EXIT_OK
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["all_within_5sigma"], summary


def test_determinism_and_workers(tmp_path):
    body = SMALL["loschmidt_scan"]
    assert run(tmp_path, "loschmidt_scan", body, "a") == EXIT_OK
    assert run(tmp_path, "loschmidt_scan", body, "b", "--workers", "2") == EXIT_OK
    a = (tmp_path / "a" / "results.csv").read_bytes()
    assert a == (tmp_path / "b" / "results.csv").read_bytes()
    assert run(tmp_path, "loschmidt_scan", body, "c", "--seed-override", "5") == EXIT_OK
    assert a != (tmp_path / "c" / "results.csv").read_bytes()


def test_resume_after_interruption(tmp_path):
    body = SMALL["loschmidt_scan"]
    assert run(tmp_path, "loschmidt_scan", body) == EXIT_OK
    out = tmp_path / "out"
    full = (out / "results.csv").read_bytes()
    man = json.loads((out / "manifest.json").read_text())
    man["completed_tasks"] = [0]
    man["status"] = "running"
    (out / "manifest.json").write_text(json.dumps(man))
    (out / "parts" / "task_0001.json").unlink()
    (out / "results.csv").unlink()
    assert run(tmp_path, "loschmidt_scan", body) == EXIT_OK
    assert (out / "results.csv").read_bytes() == full


def test_resume_refuses_other_config(tmp_path):
    assert run(tmp_path, "loschmidt_scan", SMALL["loschmidt_scan"]) == EXIT_OK
    other = dict(SMALL["loschmidt_scan"], circuits=301)
    assert run(tmp_path, "loschmidt_scan", other) == EXIT_VALIDATION


def test_resources_table(tmp_path):
    assert run(tmp_path, "resources", {}) == EXIT_OK
    rows = read_rows(tmp_path / "out" / "results.csv")
    assert [int(r["n_qubits"]) for r in rows] == [50, 100]
    assert all(r["label"] == "order-of-magnitude estimate" for r in rows)
