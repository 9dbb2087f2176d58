"""Built-in scenarios and the JSON scenario file format.

A scenario bundles the structure constants of an 8-dimensional Lie
algebra, an invariant structure 4-form, a frame metric, and free
parameters.  Built-ins:

  * ``su3``    -- the compact group SU(3) with a nearly parallel
                  structure adapted to the negative Killing metric;
  * ``hk-t5``  -- the solvable group H(k) x T^5 (parameter ``k``, default 1)
                  carrying a balanced structure;
  * ``torus``  -- the 8-torus with the reference form (zero torsion).

File format (JSON object)::

    {
      "name": "my-scenario",
      "structure_constants": [[i, j, k, value], ...],   # c^k_{ij}, 1-based
      "phi_coeffs": {"1234": 1.0, ...},                 # ascending blades
      "metric": [[...], ...],                           # 8x8, default identity
      "params": {}
    }

``phi_coeffs`` may also be given as a list of [multi-index, value] pairs;
the legacy key ``phi`` is accepted as an alias.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cayley import CayleyStructure, reference_cayley
from .exterior import DIM, Form, Metric
from .homogeneous import InvariantGeometry, LieAlgebraData


class ScenarioError(ValueError):
    """A malformed scenario file; the message names the offending field."""


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    algebra: LieAlgebraData
    phi: Form
    metric: Metric
    params: dict = field(default_factory=dict)

    def structure(self) -> CayleyStructure:
        return CayleyStructure(self.phi, self.metric)

    def geometry(self) -> InvariantGeometry:
        return InvariantGeometry(self.algebra, self.metric)

    def to_json_dict(self) -> dict:
        c = self.algebra.structure_constants
        entries = []
        for i in range(DIM):
            for j in range(i + 1, DIM):
                for k in range(DIM):
                    if c[k, i, j] != 0.0:
                        entries.append([i + 1, j + 1, k + 1, c[k, i, j]])
        return {
            "name": self.name,
            "structure_constants": entries,
            "phi_coeffs": self.phi.blade_dict(),
            "metric": [list(row) for row in self.metric.matrix],
            "params": dict(self.params),
        }


def structure_constants_from_entries(entries) -> np.ndarray:
    """Assemble c[k, i, j] from sparse (i, j, k, value) rows, 1-based."""
    c = np.zeros((DIM, DIM, DIM))
    for i, j, k, value in entries:
        c[k - 1, i - 1, j - 1] += value
        c[k - 1, j - 1, i - 1] -= value
    return c


_S6 = math.sqrt(3.0) / 6.0
_S3 = math.sqrt(3.0) / 3.0

# c^k_{ij} rows (i, j, k, value) for su(3) in the frame orthonormal for
# minus six times the trace form; see the oracle test against explicit
# 3x3 matrices.
SU3_STRUCTURE_ENTRIES: tuple[tuple[int, int, int, float], ...] = (
    (2, 6, 1, _S6),
    (3, 7, 1, _S3),
    (4, 8, 1, _S6),
    (1, 6, 2, -_S6),
    (3, 4, 2, -_S6),
    (5, 6, 2, -0.5),
    (7, 8, 2, -_S6),
    (1, 7, 3, -_S3),
    (2, 4, 3, _S6),
    (6, 8, 3, -_S6),
    (1, 8, 4, -_S6),
    (2, 3, 4, -_S6),
    (5, 8, 4, 0.5),
    (6, 7, 4, -_S6),
    (2, 6, 5, 0.5),
    (4, 8, 5, -0.5),
    (1, 2, 6, _S6),
    (2, 5, 6, -0.5),
    (3, 8, 6, _S6),
    (4, 7, 6, _S6),
    (1, 3, 7, _S3),
    (2, 8, 7, _S6),
    (4, 6, 7, -_S6),
    (1, 4, 8, _S6),
    (2, 7, 8, -_S6),
    (3, 6, 8, -_S6),
    (4, 5, 8, 0.5),
)

# The overall sign is pinned by admissibility: with the identity metric
# this sign pattern is self-dual AND has blade-action spectrum {3 x7, -1 x21},
# while its negative (self-dual as well) has the mirrored spectrum
# {-3 x7, +1 x21} and is rejected by check_admissible.  Of the 2^14 sign
# patterns on this blade support exactly eight are admissible, and all
# eight produce identical curvature and torsion invariants.
SU3_PHI_BLADES: dict[str, float] = {
    "1235": -1.0,
    "1248": -1.0,
    "1267": -1.0,
    "1346": -1.0,
    "1378": -1.0,
    "1457": -1.0,
    "1568": -1.0,
    "2347": -1.0,
    "2368": 1.0,
    "2456": 1.0,
    "2578": -1.0,
    "3458": -1.0,
    "3567": 1.0,
    "4678": 1.0,
}

HK_PHI_BLADES: dict[str, float] = {
    "1234": 1.0,
    "1256": -1.0,
    "1278": -1.0,
    "1357": -1.0,
    "1368": 1.0,
    "1458": -1.0,
    "1467": -1.0,
    "5678": 1.0,
    "3478": -1.0,
    "3456": -1.0,
    "2468": -1.0,
    "2457": 1.0,
    "2367": -1.0,
    "2358": -1.0,
}


def su3() -> Scenario:
    return Scenario(
        name="su3",
        algebra=LieAlgebraData(structure_constants_from_entries(SU3_STRUCTURE_ENTRIES)),
        phi=Form.from_blades(4, SU3_PHI_BLADES),
        metric=Metric.identity(),
    )


def hk_t5(k: float = 1.0) -> Scenario:
    """H(k) x T^5: de^6 = -k e^{68}, de^7 = +k e^{78}, all else closed."""
    entries = ((6, 8, 6, k), (7, 8, 7, -k))
    return Scenario(
        name="hk-t5",
        algebra=LieAlgebraData(structure_constants_from_entries(entries)),
        phi=Form.from_blades(4, HK_PHI_BLADES),
        metric=Metric.identity(),
        params={"k": k},
    )


def torus() -> Scenario:
    return Scenario(
        name="torus",
        algebra=LieAlgebraData(np.zeros((DIM, DIM, DIM))),
        phi=reference_cayley(),
        metric=Metric.identity(),
    )


BUILTIN_SCENARIOS = {"su3": su3, "hk-t5": hk_t5, "torus": torus}


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise ScenarioError(message)


def scenario_from_dict(data: dict, default_name: str = "scenario") -> Scenario:
    _expect(isinstance(data, dict), "top level: expected a JSON object")
    name = data.get("name", default_name)
    _expect(isinstance(name, str), "name: expected a string")

    raw_entries = data.get("structure_constants", [])
    _expect(isinstance(raw_entries, list), "structure_constants: expected a list")
    entries = []
    for pos, row in enumerate(raw_entries):
        label = f"structure_constants[{pos}]"
        _expect(isinstance(row, (list, tuple)) and len(row) == 4, f"{label}: expected [i, j, k, value]")
        i, j, k, value = row
        _expect(
            all(isinstance(x, int) and 1 <= x <= DIM for x in (i, j, k)),
            f"{label}: indices must be integers in 1..8",
        )
        _expect(i != j, f"{label}: bracket indices must differ")
        _expect(isinstance(value, (int, float)) and not isinstance(value, bool), f"{label}: value must be a number")
        entries.append((i, j, k, float(value)))

    raw_phi = data.get("phi_coeffs", data.get("phi"))
    if isinstance(raw_phi, list):
        pairs = []
        for pos, row in enumerate(raw_phi):
            _expect(
                isinstance(row, (list, tuple)) and len(row) == 2,
                f"phi_coeffs[{pos}]: expected a [multi-index, value] pair",
            )
            pairs.append(tuple(row))
        raw_phi = dict(pairs)
        _expect(len(raw_phi) == len(pairs), "phi_coeffs: duplicate multi-index")
    _expect(
        isinstance(raw_phi, dict) and raw_phi,
        "phi_coeffs: expected a non-empty mapping of blade coefficients",
    )
    blades = {}
    for key, value in raw_phi.items():
        label = f"phi_coeffs[{key!r}]"
        _expect(isinstance(key, str) and len(key) == 4, f"{label}: blade keys are 4 ascending digits")
        _expect(isinstance(value, (int, float)) and not isinstance(value, bool), f"{label}: value must be a number")
        blades[key] = float(value)
    try:
        phi = Form.from_blades(4, blades)
    except ValueError as exc:
        raise ScenarioError(f"phi_coeffs: {exc}") from exc

    raw_metric = data.get("metric")
    if raw_metric is None:
        metric = Metric.identity()
    else:
        matrix = np.asarray(raw_metric, dtype=object)
        _expect(matrix.shape == (DIM, DIM), "metric: expected an 8x8 array")
        try:
            metric = Metric(np.asarray(raw_metric, dtype=np.float64))
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"metric: {exc}") from exc

    params = data.get("params", {})
    _expect(isinstance(params, dict), "params: expected an object")

    try:
        algebra = LieAlgebraData(structure_constants_from_entries(entries))
    except ValueError as exc:
        raise ScenarioError(f"structure_constants: {exc}") from exc

    return Scenario(name=name, algebra=algebra, phi=phi, metric=metric, params=params)


def load_scenario(source: str | Path, params: dict | None = None) -> Scenario:
    """A built-in scenario by name, or a scenario JSON file by path."""
    key = str(source)
    if key in BUILTIN_SCENARIOS:
        factory = BUILTIN_SCENARIOS[key]
        return factory(**(params or {}))
    path = Path(source)
    if not path.exists():
        raise ScenarioError(
            f"unknown scenario {key!r}: not a built-in ({', '.join(sorted(BUILTIN_SCENARIOS))}) "
            "and no such file"
        )
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON ({exc})") from exc
    return scenario_from_dict(data, default_name=path.stem)
