"""End-to-end CLI behaviour: payloads, exit codes, error channels."""

from __future__ import annotations

import csv
import io
import json
import subprocess

import numpy as np
import pytest

from cayleyflow.cli import main
from cayleyflow.scenarios import su3, torus

S3 = np.sqrt(3.0)


def run_cli(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_verify_su3(capsys):
    code, out, err = run_cli(capsys, "verify", "su3")
    assert code == 0 and err == ""
    payload = json.loads(out)
    assert payload["scenario"] == "su3"
    assert payload["admissible"] is True
    assert payload["unimodular"] is True
    assert payload["abelian"] is False
    assert payload["tolerance"] == 1e-8
    assert set(payload["residuals"]) == {"self_dual", "wedge_square", "spectrum"}
    assert payload["jacobi_residual"] < 1e-12


def test_verify_rejects_misnormalized_form(capsys, tmp_path):
    data = torus().to_json_dict()
    data["phi_coeffs"] = {k: 2.0 * v for k, v in data["phi_coeffs"].items()}
    path = tmp_path / "doubled.json"
    path.write_text(json.dumps(data))
    code, out, _ = run_cli(capsys, "verify", str(path))
    assert code == 1
    payload = json.loads(out)
    assert payload["admissible"] is False
    assert payload["residuals"]["wedge_square"] == pytest.approx(3.0, abs=1e-12)


def test_verify_tolerance_env(capsys, monkeypatch):
    monkeypatch.setenv("CAYLEY_FLOW_TOL", "1e-2")
    code, out, _ = run_cli(capsys, "verify", "su3")
    assert code == 0
    assert json.loads(out)["tolerance"] == 0.01

    monkeypatch.setenv("CAYLEY_FLOW_TOL", "abc")
    code, out, err = run_cli(capsys, "verify", "su3")
    assert code == 1 and out == ""
    assert "CAYLEY_FLOW_TOL" in err


def test_torsion_su3(capsys):
    code, out, _ = run_cli(capsys, "torsion", "su3")
    assert code == 0
    payload = json.loads(out)
    assert payload["norm_sq"] == pytest.approx(0.5, abs=1e-12)
    assert payload["one_form"] == pytest.approx(
        {"3": -3.0 / 7, "4": 3.0 / 7, "5": -S3 / 7, "8": 3 * S3 / 7}, abs=1e-12
    )
    assert payload["rows"]["5"]["12"] == pytest.approx(-1.0 / 16, abs=1e-12)
    assert payload["divergence"] == {}
    assert payload["classes"] == {
        "parallel": False,
        "balanced": False,
        "locally_conformally_parallel": False,
    }
    assert payload["one_form_norm_sq"] == pytest.approx(48.0 / 49.0, abs=1e-12)
    assert payload["five_form_norm_sq"] == pytest.approx(8.0 / 7.0, abs=1e-12)


def test_torsion_torus_classes(capsys):
    _, out, _ = run_cli(capsys, "torsion", "torus")
    payload = json.loads(out)
    assert payload["classes"]["parallel"] is True
    assert payload["norm_sq"] == 0.0


def test_rhs_su3(capsys):
    code, out, _ = run_cli(capsys, "rhs", "su3", "--rhs", "gradient")
    assert code == 0
    payload = json.loads(out)
    A = np.array(payload["velocity_tensor"])
    assert A.shape == (8, 8)
    assert A[0, 0] == pytest.approx(-0.75 + 18.0 / 48.0, abs=1e-12)
    assert np.allclose(payload["metric_rate"], A + A.T, atol=1e-12)
    assert payload["scalar_curvature"] == pytest.approx(2.0, abs=1e-12)
    assert payload["torsion_norm_sq"] == pytest.approx(0.5, abs=1e-12)
    soliton = payload["soliton"]
    assert soliton["is_soliton"] is False
    assert soliton["lambda"] == pytest.approx(-1.5, abs=1e-12)


def test_soliton_payloads(capsys):
    _, out, _ = run_cli(capsys, "soliton", "su3", "--rhs", "ricci-harmonic")
    payload = json.loads(out)
    assert payload["is_soliton"] is True
    assert payload["lambda"] == pytest.approx(-1.0, abs=1e-10)
    assert payload["classification"] == "shrinking"

    _, out, _ = run_cli(capsys, "soliton", "hk-t5")
    payload = json.loads(out)
    assert payload["is_soliton"] is False
    assert payload["lambda"] == pytest.approx(-3.0, abs=1e-10)
    assert payload["residual"] == pytest.approx(np.sqrt(14.0), abs=1e-10)


def test_stability_payload(capsys):
    code, out, _ = run_cli(
        capsys, "stability", "su3", "--family", "asd-exp-4", "--lambda", "-3"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["growth_rate"] == pytest.approx(7.0 / 6.0, abs=1e-6)
    assert payload["pairing"] == pytest.approx(payload["growth_rate"] / 2.0)
    assert payload["classification"] == "unstable"
    assert payload["lambda"] == -3.0

    _, out, _ = run_cli(capsys, "stability", "su3", "--family", "asd-exp-0", "--lambda", "-3")
    assert json.loads(out)["classification"] == "stable"


def test_stability_default_lambda_is_soliton_projection(capsys):
    _, out, _ = run_cli(capsys, "stability", "su3", "--family", "first-order")
    payload = json.loads(out)
    assert payload["lambda"] == pytest.approx(-1.5, abs=1e-12)


def test_stability_unknown_family(capsys):
    code, out, err = run_cli(capsys, "stability", "su3", "--family", "nope")
    assert code == 1 and out == ""
    assert "unknown family 'nope'" in err
    assert "asd-exp-0" in err and "omega47" in err


def test_stability_wrong_base(capsys):
    code, _, err = run_cli(capsys, "stability", "hk-t5", "--family", "asd-exp-0")
    assert code == 1
    assert "su3 base" in err


def test_integrate_csv_torus(capsys):
    code, out, err = run_cli(
        capsys, "integrate", "torus", "--t-end", "0.5", "--dt", "0.1"
    )
    assert code == 0 and err == ""
    rows = list(csv.reader(io.StringIO(out)))
    header, data = rows[0], rows[1:]
    assert header[0] == "t"
    assert header.count("torsion_norm_sq") == 1
    assert len(header) == 1 + 14 + 8 + 3  # time, blades, eigenvalues, diagnostics
    assert len(data) == 6
    assert [float(r[0]) for r in data] == pytest.approx(np.arange(6) * 0.1)
    for row in data:  # flat state: every non-time column is constant
        assert row[1:] == data[0][1:]
    assert float(data[0][header.index("lambda_residual")]) == 0.0


def test_integrate_json_format(capsys):
    code, out, _ = run_cli(
        capsys, "integrate", "torus", "--t-end", "0.2", "--dt", "0.1",
        "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["scenario"] == "torus"
    assert payload["rhs"] == "gradient"
    assert payload["dt"] == 0.1
    assert len(payload["rows"]) == 3
    assert len(payload["rows"][0]) == len(payload["columns"])


def test_integrate_abort_exit_code(capsys, tmp_path):
    c = 0.0011
    data = torus().to_json_dict()
    data["phi_coeffs"] = {k: v * c**4 for k, v in data["phi_coeffs"].items()}
    data["metric"] = (c**2 * np.eye(8)).tolist()
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(data))
    code, out, err = run_cli(
        capsys, "integrate", str(path), "--t-end", "0.5", "--dt", "0.1",
        "--lambda", "4.0",
    )
    assert code == 2
    diagnostics = json.loads(err)
    assert diagnostics["reason"] == "metric degenerate (possible finite-time singularity)"
    assert diagnostics["aborted_at"] == pytest.approx(0.1)
    assert "metric_eigenvalues" in diagnostics["diagnostics"]
    rows = list(csv.reader(io.StringIO(out)))
    assert len(rows) == 2  # header plus the initial state


def test_schema_error_message(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "structure_constants": [[2, 2, 3, 1.0]],
        "phi_coeffs": dict(torus().phi.blade_dict()),
    }))
    code, out, err = run_cli(capsys, "verify", str(path))
    assert code == 1 and out == ""
    assert err == "error: structure_constants[0]: bracket indices must differ\n"


def test_out_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, "verify", "su3", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["admissible"] is True


def test_scenario_flag_and_conflicts(capsys):
    code, out, _ = run_cli(capsys, "verify", "--scenario", "su3")
    assert code == 0 and json.loads(out)["scenario"] == "su3"
    with pytest.raises(SystemExit):
        main(["verify", "su3", "--scenario", "hk-t5"])
    with pytest.raises(SystemExit):
        main(["verify"])  # scenario is required


def test_reproduce_su3(capsys):
    code, out, _ = run_cli(capsys, "reproduce", "su3")
    assert code == 0
    payload = json.loads(out)
    section = payload["su3"]
    assert np.allclose(section["ricci"], 0.25 * np.eye(8), atol=1e-12)
    assert section["soliton"]["ricci-harmonic"]["is_soliton"] is True
    assert section["soliton"]["gradient"]["lambda"] == pytest.approx(-1.5)
    stability = payload["stability"]
    assert stability["lambda"] == -3.0
    assert stability["asd-exp-0"] == pytest.approx(-11.0 / 12.0, abs=1e-6)
    assert stability["first-order"] == pytest.approx(-7.0 / 6.0, abs=1e-6)
    assert stability["omega47"] == pytest.approx(673.0 / 48.0, abs=1e-5)


def test_outputs_are_deterministic(capsys):
    _, first, _ = run_cli(capsys, "torsion", "su3")
    _, second, _ = run_cli(capsys, "torsion", "su3")
    assert first == second


def test_console_script():
    result = subprocess.run(
        ["cayley-flow", "soliton", "su3", "--rhs", "harmonic"],
        capture_output=True, text=True, timeout=120,
    )
    assert result.returncode == 0
    payload = json.loads(result.stdout)
    assert payload["is_soliton"] is True
    assert payload["classification"] == "steady"
