"""Command-line interface: subcommands, exit codes, artifacts."""

import json
from pathlib import Path

import pytest

from pcgrav.cli import main

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def run(args, tmp_path, capsys=None):
    code = main([*args])
    out = capsys.readouterr().out if capsys else ""
    return code, out


def test_algebra_check_passes_on_shipped_files(tmp_path, capsys):
    for name in ("so3.json", "poincare_algebra.json", "r3.json"):
        code, out = run(["algebra", "check", str(SCENARIOS / name)],
                        tmp_path, capsys)
        assert code == 0 and "pass" in out


def test_algebra_check_flags_broken_structure(tmp_path, capsys):
    doc = json.loads((SCENARIOS / "so3.json").read_text())
    doc["brackets"][0]["out"][0]["c"] = "2"  # perturb one constant
    bad = tmp_path / "bad_so3.json"
    bad.write_text(json.dumps(doc))
    code, out = run(["algebra", "check", str(bad)], tmp_path, capsys)
    assert code == 1
    assert "antisymmetry" in out or "jacobi" in out


def test_algebra_parse_error_is_usage_error(tmp_path, capsys):
    bad = tmp_path / "nonsense.json"
    bad.write_text("{\"basis\": [{\"label\": \"x\"}]}")
    code, _ = run(["algebra", "check", str(bad)], tmp_path, capsys)
    assert code == 2
    missing = tmp_path / "missing.json"
    code, _ = run(["algebra", "check", str(missing)], tmp_path, capsys)
    assert code == 2


def test_algebra_action_builds_semidirect_sum(tmp_path, capsys):
    code, out = run(["algebra", "action", str(SCENARIOS / "so3.json"),
                     str(SCENARIOS / "r3.json"),
                     str(SCENARIOS / "so3_vector_action.json")],
                    tmp_path, capsys)
    assert code == 0 and "exact sequence: pass" in out


def test_unknown_subcommand_is_usage_error(tmp_path):
    assert main(["frobnicate"]) == 2


def small_scenario_file(tmp_path, **overrides):
    doc = {"scenario": "spherical", "geometry": "schwarzschild", "M": 0.5,
           "grid": {"L": 8.0, "N": 13}, "Ns": [9, 13],
           "cutoff": {"r": 3.0, "R": 5.0}, "radius_mode": "spatial",
           "radii": [4.0, 5.0, 6.0],
           "thresholds": {"eom_abs_tol": 0.05}}
    doc.update(overrides)
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc))
    return path


def test_pc_action_emits_json_report(tmp_path, capsys):
    path = small_scenario_file(tmp_path)
    code, out = run(["pc", "action", "--scenario", str(path),
                     "--out", str(tmp_path / "reports")], tmp_path, capsys)
    assert code == 0
    body = json.loads(out)
    assert {"S", "N", "h"} <= set(body)
    report = json.loads((tmp_path / "reports" / "pc_action.json").read_text())
    assert report["body"] == body
    assert report["manifest"]["scenario_hash"]
    assert report["manifest"]["versions"]["pcgrav"]


def test_pc_eom_passes_on_shell_and_fails_off_shell(tmp_path, capsys):
    on_shell = small_scenario_file(tmp_path)
    code, out = run(["pc", "eom", "--scenario", str(on_shell),
                     "--out", str(tmp_path / "r1")], tmp_path, capsys)
    assert code == 0
    body = json.loads(out)
    assert body["torsion_norm"] < 0.05 and body["einstein_norm"] < 0.05

    code, out = run(["pc", "eom", "--scenario",
                     str(SCENARIOS / "minkowski_lambda1.json"),
                     "--out", str(tmp_path / "r2")], tmp_path, capsys)
    assert code == 1
    body = json.loads(out)
    assert body["einstein_norm"] == pytest.approx(1.0, abs=1e-12)


def test_killing_residuals_writes_csv(tmp_path, capsys):
    # flat geometry: verdicts are exact passes at any resolution, so this
    # exercises the full reporting path with a deterministic exit code
    path = small_scenario_file(tmp_path, geometry="minkowski", M=0.0)
    out_dir = tmp_path / "reports"
    code, out = run(["killing", "residuals", "--scenario", str(path),
                     "--out", str(out_dir)], tmp_path, capsys)
    assert code == 0
    csv_text = (out_dir / "residuals_minkowski.csv").read_text()
    header = csv_text.splitlines()[0].split(",")
    assert header == ["generator", "norm_N9", "slope", "verdict"]
    assert len(csv_text.splitlines()) == 5
    assert all(line.endswith("pass") for line in csv_text.splitlines()[1:])


def test_mass_commands(tmp_path, capsys):
    path = small_scenario_file(tmp_path, grid={"L": 8.0, "N": 17})
    code, out = run(["mass", "adm", "--scenario", str(path),
                     "--out", str(tmp_path / "m1")], tmp_path, capsys)
    assert code == 0
    body = json.loads(out)
    assert body["radii"] == [4.0, 5.0, 6.0]
    assert body["positivity"]["passed"]
    code, out = run(["mass", "komar", "--scenario", str(path),
                     "--radii", "4,6", "--out", str(tmp_path / "m2")],
                    tmp_path, capsys)
    assert code == 0
    assert json.loads(out)["radii"] == [4.0, 6.0]


def test_convergence_command_reports_slopes(tmp_path, capsys):
    path = small_scenario_file(tmp_path, Ns=[9, 13, 17])
    code, out = run(["convergence", "--scenario", str(path),
                     "--quantities", "torsion", "leibniz",
                     "--out", str(tmp_path / "c1")], tmp_path, capsys)
    body = json.loads(out)
    assert set(body["quantities"]) == {"torsion", "leibniz"}
    assert body["quantities"]["leibniz"]["slope"] >= 1.7
    assert code in (0, 3)


def test_convergence_reports_exact_sequences_without_a_slope(tmp_path, capsys):
    path = small_scenario_file(tmp_path, geometry="minkowski", M=0.0,
                               Ns=[9, 13, 17])
    out_dir = tmp_path / "cx"
    code, out = run(["convergence", "--scenario", str(path),
                     "--quantities", "torsion",
                     "--out", str(out_dir)], tmp_path, capsys)
    assert code == 0
    entry = json.loads(out)["quantities"]["torsion"]
    assert entry["kind"] == "exact" and entry["slope"] is None
    csv_text = (out_dir / "convergence.csv").read_text()
    assert "exact" in csv_text


def test_convergence_flags_non_decaying_translation(tmp_path, capsys):
    path = small_scenario_file(tmp_path, Ns=[9, 13, 17],
                               grid={"L": 8.0, "N": 17})
    code, out = run(["convergence", "--scenario", str(path),
                     "--quantities", "symmetry:P1",
                     "--out", str(tmp_path / "cp")], tmp_path, capsys)
    assert code == 1
    entry = json.loads(out)["quantities"]["symmetry:P1"]
    assert entry["kind"] == "non-decaying" and entry["verdict"] == "fail"


def test_killing_residuals_full_spherical_scenario(tmp_path, capsys):
    # the shipped black-hole scenario: four passing generators, exit 0
    out_dir = tmp_path / "full"
    code, out = run(["killing", "residuals", "--scenario",
                     str(SCENARIOS / "spherical_schwarzschild.json"),
                     "--out", str(out_dir)], tmp_path, capsys)
    assert code == 0
    lines = (out_dir / "residuals_schwarzschild.csv").read_text().splitlines()
    assert len(lines) == 5
    assert all(line.endswith("pass") for line in lines[1:])
    body = json.loads(out)
    assert body["verdict"] == "pass"
    assert body["masses"]["komar_adm_agreement"]["verdict"] == "pass"


def test_convergence_needs_three_resolutions(tmp_path, capsys):
    path = small_scenario_file(tmp_path, Ns=[9, 13])
    code, _ = run(["convergence", "--scenario", str(path)], tmp_path, capsys)
    assert code == 2


def test_threads_flag_is_recorded_not_numeric(tmp_path, capsys):
    path = small_scenario_file(tmp_path)
    bodies = {}
    for threads in ("1", "3"):
        out_dir = tmp_path / f"t{threads}"
        code, _ = run(["pc", "eom", "--scenario", str(path),
                       "--threads", threads, "--out", str(out_dir)],
                      tmp_path, capsys)
        report = json.loads((out_dir / "pc_eom.json").read_text())
        assert report["manifest"]["threads"] == int(threads)
        bodies[threads] = json.dumps(report["body"], sort_keys=True)
    assert bodies["1"] == bodies["3"]


def test_env_var_output_dir(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("PCGRAV_OUT", str(tmp_path / "env_out"))
    path = small_scenario_file(tmp_path)
    code, _ = run(["pc", "action", "--scenario", str(path)], tmp_path, capsys)
    assert code == 0
    assert (tmp_path / "env_out" / "pc_action.json").exists()