"""Gradient, harmonic, and Ricci-coupled flows of Cayley 4-form structures
on homogeneous 8-manifolds described by Lie-algebra structure constants.

Layer map:

* :mod:`cayleyflow.exterior` -- forms, wedge/interior products, Hodge star;
* :mod:`cayleyflow.cayley` -- admissibility, component projectors, the
  diamond action and the i/j maps;
* :mod:`cayleyflow.homogeneous` -- invariant exterior derivative,
  Levi-Civita data, curvature;
* :mod:`cayleyflow.torsion` -- torsion tensor, torsion forms, divergence;
* :mod:`cayleyflow.flow` -- flow velocity laws (two independent routes each);
* :mod:`cayleyflow.dynamics` -- RK4 integration, solitons, stability probes;
* :mod:`cayleyflow.scenarios` / :mod:`cayleyflow.cli` -- built-in states,
  JSON scenario files, and the ``cayley-flow`` command.
"""

from .cayley import AdmissibilityReport, CayleyStructure, check_admissible, reference_cayley
from .dynamics import (
    DeformationFamily,
    FlowAborted,
    SolitonReport,
    Trajectory,
    builtin_families,
    integrate,
    renormalised_rhs,
    rescale,
    soliton_check,
    stability_probe,
)
from .exterior import Form, Metric, hodge_star, inner, interior, pullback, wedge
from .flow import (
    RHS_FUNCTIONS,
    FlowRHS,
    FlowState,
    gradient_rhs_forms,
    gradient_rhs_raw,
    harmonic_rhs,
    ricci_forms,
    ricci_harmonic_rhs,
    ricci_raw,
    t_star_t,
    torsion_evolution_rhs,
)
from .homogeneous import (
    InvariantGeometry,
    LieAlgebraData,
    codifferential,
    covariant_derivative,
    invariant_d,
    levi_civita,
    lie_derivative_metric,
)
from .scenarios import (
    BUILTIN_SCENARIOS,
    Scenario,
    ScenarioError,
    hk_t5,
    load_scenario,
    scenario_from_dict,
    su3,
    torus,
)
from .torsion import (
    TorsionData,
    div_T,
    is_balanced,
    is_locally_conformally_parallel,
    torsion_forms,
    torsion_norm_sq,
    torsion_tensor_from_forms,
    torsion_tensor_nabla,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "BUILTIN_SCENARIOS",
    "CayleyStructure",
    "DeformationFamily",
    "FlowAborted",
    "FlowRHS",
    "FlowState",
    "Form",
    "InvariantGeometry",
    "LieAlgebraData",
    "Metric",
    "RHS_FUNCTIONS",
    "Scenario",
    "ScenarioError",
    "SolitonReport",
    "TorsionData",
    "Trajectory",
    "builtin_families",
    "check_admissible",
    "codifferential",
    "covariant_derivative",
    "div_T",
    "gradient_rhs_forms",
    "gradient_rhs_raw",
    "harmonic_rhs",
    "hk_t5",
    "hodge_star",
    "inner",
    "integrate",
    "interior",
    "invariant_d",
    "is_balanced",
    "is_locally_conformally_parallel",
    "levi_civita",
    "lie_derivative_metric",
    "load_scenario",
    "pullback",
    "reference_cayley",
    "renormalised_rhs",
    "rescale",
    "ricci_forms",
    "ricci_harmonic_rhs",
    "ricci_raw",
    "scenario_from_dict",
    "soliton_check",
    "stability_probe",
    "su3",
    "t_star_t",
    "torsion_evolution_rhs",
    "torsion_forms",
    "torsion_norm_sq",
    "torsion_tensor_from_forms",
    "torsion_tensor_nabla",
    "torus",
    "wedge",
]
