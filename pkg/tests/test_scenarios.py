"""Scenario files: built-ins, JSON round trips, and schema error messages."""

from __future__ import annotations

import json

import numpy as np
import pytest

from cayleyflow.cayley import check_admissible
from cayleyflow.exterior import Form
from cayleyflow.scenarios import (
    BUILTIN_SCENARIOS,
    ScenarioError,
    hk_t5,
    load_scenario,
    scenario_from_dict,
    su3,
    torus,
)


def test_builtin_scenarios():
    assert set(BUILTIN_SCENARIOS) == {"su3", "hk-t5", "torus"}
    for factory in BUILTIN_SCENARIOS.values():
        scenario = factory()
        report = check_admissible(scenario.phi, scenario.metric)
        assert report.ok and not report.borderline
        assert np.allclose(scenario.metric.matrix, np.eye(8))
    assert su3().name == "su3"
    assert hk_t5(2.5).params == {"k": 2.5}
    assert torus().algebra.is_abelian


def test_hk_bracket_encoding():
    """de^6 = -k e^{68} and de^7 = +k e^{78}; every other basis 1-form is closed."""
    for k in (1.0, 2.5):
        algebra = hk_t5(k).algebra
        for m in range(8):
            basis = Form.from_blades(1, {str(m + 1): 1.0})
            d = algebra.d(basis).blade_dict(tol=1e-14)
            if m == 5:
                assert d == pytest.approx({"68": -k})
            elif m == 6:
                assert d == pytest.approx({"78": k})
            else:
                assert d == {}


def test_json_round_trip():
    for factory in BUILTIN_SCENARIOS.values():
        original = factory()
        data = json.loads(json.dumps(original.to_json_dict()))
        loaded = scenario_from_dict(data)
        assert loaded.name == original.name
        assert np.array_equal(
            loaded.algebra.structure_constants, original.algebra.structure_constants
        )
        assert np.array_equal(loaded.phi.coeffs, original.phi.coeffs)
        assert np.array_equal(loaded.metric.matrix, original.metric.matrix)
        assert loaded.params == original.params


def _minimal_dict(**overrides) -> dict:
    data = {
        "name": "probe",
        "structure_constants": [[6, 8, 6, 1.0], [7, 8, 7, -1.0]],
        "phi_coeffs": dict(hk_t5().phi.blade_dict()),
    }
    data.update(overrides)
    return data


def test_phi_coeffs_as_pairs():
    as_dict = scenario_from_dict(_minimal_dict())
    pairs = [[blade, value] for blade, value in hk_t5().phi.blade_dict().items()]
    as_pairs = scenario_from_dict(_minimal_dict(phi_coeffs=pairs))
    assert np.array_equal(as_dict.phi.coeffs, as_pairs.phi.coeffs)


def test_phi_legacy_key():
    data = _minimal_dict()
    data["phi"] = data.pop("phi_coeffs")
    assert np.array_equal(scenario_from_dict(data).phi.coeffs, hk_t5().phi.coeffs)


def test_default_metric_is_identity():
    scenario = scenario_from_dict(_minimal_dict())
    assert np.array_equal(scenario.metric.matrix, np.eye(8))


@pytest.mark.parametrize(
    "overrides, message",
    [
        ({"structure_constants": "nope"}, "structure_constants: expected a list"),
        ({"structure_constants": [[1, 2, 3]]}, "structure_constants[0]: expected [i, j, k, value]"),
        ({"structure_constants": [[0, 2, 3, 1.0]]}, "indices must be integers in 1..8"),
        ({"structure_constants": [[1, 2, 9, 1.0]]}, "indices must be integers in 1..8"),
        ({"structure_constants": [[2, 2, 3, 1.0]]}, "structure_constants[0]: bracket indices must differ"),
        ({"structure_constants": [[1, 2, 3, True]]}, "structure_constants[0]: value must be a number"),
        ({"phi_coeffs": {}}, "phi_coeffs: expected a non-empty mapping"),
        ({"phi_coeffs": {"123": 1.0}}, "blade keys are 4 ascending digits"),
        ({"phi_coeffs": {"1123": 1.0}}, "phi_coeffs:"),
        ({"phi_coeffs": [["1234", 1.0], ["1234", 2.0]]}, "phi_coeffs: duplicate multi-index"),
        ({"metric": [[1.0] * 8] * 7}, "metric: expected an 8x8 array"),
        ({"params": 7}, "params: expected an object"),
        ({"name": 12}, "name: expected a string"),
    ],
)
def test_schema_errors_name_the_field(overrides, message):
    with pytest.raises(ScenarioError) as err:
        scenario_from_dict(_minimal_dict(**overrides))
    assert message in str(err.value)


def test_top_level_must_be_object():
    with pytest.raises(ScenarioError, match="top level"):
        scenario_from_dict([1, 2, 3])


def test_jacobi_failure_is_wrapped():
    entries = [[1, 2, 3, 1.0], [1, 3, 1, 1.0]]
    with pytest.raises(ScenarioError, match="structure_constants:"):
        scenario_from_dict(_minimal_dict(structure_constants=entries))


def test_load_scenario_builtin_with_params():
    scenario = load_scenario("hk-t5", {"k": 2.0})
    assert scenario.params == {"k": 2.0}
    assert np.array_equal(
        scenario.algebra.structure_constants, hk_t5(2.0).algebra.structure_constants
    )


def test_load_scenario_unknown_name():
    with pytest.raises(ScenarioError) as err:
        load_scenario("so5")
    text = str(err.value)
    assert "unknown scenario 'so5'" in text
    for name in ("hk-t5", "su3", "torus"):
        assert name in text


def test_load_scenario_from_file(tmp_path):
    path = tmp_path / "custom.json"
    data = su3().to_json_dict()
    del data["name"]
    path.write_text(json.dumps(data))
    loaded = load_scenario(path)
    assert loaded.name == "custom"  # falls back to the file stem
    assert np.array_equal(loaded.phi.coeffs, su3().phi.coeffs)

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ScenarioError, match="invalid JSON"):
        load_scenario(bad)
