"""Time integration, soliton detection, and deformation-stability probes.

The flow state couples a 4-form to its frame metric; all dynamics reduce to
ODEs on the 70 form coefficients and the 36 independent metric entries.  A
classical fixed-step RK4 keeps trajectories deterministic so golden tests
can pin exact step sequences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .cayley import check_admissible
from .exterior import BLADES, Form, Metric, blade_name, pullback
from .flow import RHS_FUNCTIONS, FlowState

__all__ = [
    "DeformationFamily",
    "FlowAborted",
    "SolitonReport",
    "Trajectory",
    "builtin_families",
    "integrate",
    "renormalised_rhs",
    "rescale",
    "soliton_check",
    "stability_probe",
]

ADMISSIBILITY_TOL = 1e-6
METRIC_EIGEN_FLOOR = 1e-6

_DEG4_NAMES = [blade_name(mask) for mask in BLADES[4]]


class FlowAborted(RuntimeError):
    """Integration stopped before reaching t_end.

    Carries the partial trajectory so callers can inspect how far the flow
    ran and the diagnostics recorded at the failing step.
    """

    def __init__(self, reason: str, time: float, diagnostics: dict, trajectory: "Trajectory"):
        super().__init__(f"aborted at t={time:.6g}: {reason}")
        self.reason = reason
        self.time = time
        self.diagnostics = diagnostics
        self.trajectory = trajectory


@dataclass(frozen=True)
class DeformationFamily:
    """One-parameter family s -> (phi_s, g_s) through a base state.

    `direction` is the velocity d(phi_s)/ds at s = 0, used as the pairing
    direction by the stability probe.
    """

    name: str
    phi_of_s: Callable[[float], Form]
    metric_of_s: Callable[[float], Metric]
    direction: Form


@dataclass
class Trajectory:
    """Accepted states of one integration, including the initial state."""

    states: list[FlowState]
    rhs_kind: str
    dt: float

    @property
    def final(self) -> FlowState:
        return self.states[-1]

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.states])


class SolitonReport(NamedTuple):
    is_soliton: bool
    lam: float
    residual: float

    @property
    def classification(self) -> str:
        if abs(self.lam) <= 1e-10:
            return "steady"
        return "expanding" if self.lam > 0 else "shrinking"


def _rhs_function(rhs_kind: str):
    try:
        return RHS_FUNCTIONS[rhs_kind]
    except KeyError:
        options = ", ".join(sorted(RHS_FUNCTIONS))
        raise ValueError(f"unknown rhs kind {rhs_kind!r}; expected one of {options}")


def integrate(
    state0: FlowState,
    rhs_kind: str,
    t_end: float,
    dt: float,
    lam: float | None = None,
) -> Trajectory:
    """Run the coupled flow d(phi)/dt = A<>phi, dg/dt = 2 sym(A) with RK4.

    With `lam` given, the renormalised flow is integrated instead: the
    velocity A<>phi - lam*phi is the diamond action of A - (lam/4) g (the
    metric tensor acts as the identity derivation, g<>phi = 4 phi), so the
    metric picks up the matching -(lam/2) g term.

    Every accepted step is re-checked: the metric must stay positive
    definite (smallest eigenvalue above 1e-6, else the flow is treated as
    hitting a finite-time singularity) and the 4-form must stay admissible
    to within 1e-6.  Violations raise FlowAborted carrying the partial
    trajectory and the failing diagnostics.
    """
    rhs_fn = _rhs_function(rhs_kind)
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if t_end < 0.0:
        raise ValueError("t_end must be nonnegative")
    algebra = state0.algebra
    n_steps = int(round(t_end / dt))

    def velocity(phi_c: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        state = FlowState(phi=Form(4, phi_c), metric=Metric(g), algebra=algebra)
        rhs = rhs_fn(state)
        dphi = rhs.dPhi.coeffs
        dg = 2.0 * rhs.h
        if lam is not None:
            dphi = dphi - lam * phi_c
            dg = dg - 0.5 * lam * g
        return dphi, dg

    trajectory = Trajectory(states=[state0], rhs_kind=rhs_kind, dt=dt)
    phi_c = state0.phi.coeffs.copy()
    g = state0.metric.matrix.copy()
    time = state0.time
    for step in range(n_steps):
        k1p, k1g = velocity(phi_c, g)
        k2p, k2g = velocity(phi_c + 0.5 * dt * k1p, g + 0.5 * dt * k1g)
        k3p, k3g = velocity(phi_c + 0.5 * dt * k2p, g + 0.5 * dt * k2g)
        k4p, k4g = velocity(phi_c + dt * k3p, g + dt * k3g)
        phi_c = phi_c + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        g = g + (dt / 6.0) * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
        time = state0.time + (step + 1) * dt

        eigenvalues = np.linalg.eigvalsh(g)
        if eigenvalues.min() < METRIC_EIGEN_FLOOR:
            raise FlowAborted(
                "metric degenerate (possible finite-time singularity)",
                time,
                {"metric_eigenvalues": eigenvalues.tolist()},
                trajectory,
            )
        metric = Metric(g)
        phi = Form(4, phi_c)
        report = check_admissible(phi, metric, tol=ADMISSIBILITY_TOL)
        if not report.ok:
            raise FlowAborted(
                "admissibility lost along the flow",
                time,
                {"residuals": report.residuals},
                trajectory,
            )
        trajectory.states.append(
            FlowState(phi=phi, metric=metric, algebra=algebra, time=time)
        )
    return trajectory


def soliton_check(state: FlowState, rhs_kind: str = "gradient") -> SolitonReport:
    """Test whether the velocity is proportional to phi (vector field Y = 0).

    lam is the metric projection <A<>phi, phi>/|phi|^2; the state is a
    soliton when the residual A<>phi - lam*phi stays below 1e-8 |phi|.
    """
    rhs = _rhs_function(rhs_kind)(state)
    g = state.metric
    phi = state.phi
    norm_sq = g.norm_sq(phi)
    lam = g.inner(rhs.dPhi, phi) / norm_sq
    residual = g.norm(rhs.dPhi - phi * lam)
    return SolitonReport(
        is_soliton=bool(residual < 1e-8 * math.sqrt(norm_sq)),
        lam=float(lam),
        residual=float(residual),
    )


def renormalised_rhs(state: FlowState, lam: float, rhs_kind: str = "gradient") -> Form:
    """Velocity of the renormalised flow: A<>phi - lam*phi.

    A soliton with constant lam is a fixed point of this flow, which is the
    quantity the stability probe differentiates.
    """
    rhs = _rhs_function(rhs_kind)(state)
    return rhs.dPhi - state.phi * lam


def stability_probe(
    base: FlowState,
    fam: DeformationFamily,
    lam: float,
    rhs_kind: str = "gradient",
) -> float:
    """Directional growth rate 2<d/ds V(s)|_0, direction> of the renormalised flow.

    V(s) is the renormalised velocity on (phi_s, g_s).  The derivative is a
    central difference with Richardson step control: start at h = 1e-4 and
    halve until two successive estimates agree to 1e-6.  The sign classifies
    the direction (positive unstable, negative stable, magnitude below 1e-6
    a zero mode); the inner product is taken with the base metric.
    """
    phi0 = fam.phi_of_s(0.0)
    g0 = fam.metric_of_s(0.0)
    if np.abs(phi0.coeffs - base.phi.coeffs).max() > 1e-10 or (
        np.abs(g0.matrix - base.metric.matrix).max() > 1e-10
    ):
        raise ValueError(f"family {fam.name!r} does not pass through the base state at s = 0")

    algebra = base.algebra
    rhs_fn = _rhs_function(rhs_kind)

    def velocity(s: float) -> Form:
        phi_s = fam.phi_of_s(s)
        state = FlowState(phi=phi_s, metric=fam.metric_of_s(s), algebra=algebra)
        return rhs_fn(state).dPhi - phi_s * lam

    h = 1e-4
    previous = None
    value = 0.0
    for _ in range(20):
        derivative = (velocity(h) - velocity(-h)) * (0.5 / h)
        value = 2.0 * base.metric.inner(derivative, fam.direction)
        if previous is not None and abs(value - previous) <= 1e-6:
            return value
        previous = value
        h *= 0.5
    return value


def rescale(state: FlowState, c: float) -> FlowState:
    """Homothety (phi, g) -> (c^4 phi, c^2 g); torsion scales as c^2 T."""
    if c <= 0.0:
        raise ValueError("rescale factor must be positive")
    return FlowState(
        phi=state.phi * c**4,
        metric=Metric(c**2 * state.metric.matrix),
        algebra=state.algebra,
        time=state.time,
    )


# --- builtin deformation families ---------------------------------------------

# Hodge-dual blade pairs carrying the 4-form's support; stretching the four
# frame directions of the first blade (and shrinking the complement) scales
# the pair by e^{+s}, e^{-s} while leaving the other twelve blades fixed.
_ASD_PAIRS = [
    ("1235", "4678"),
    ("1248", "3567"),
    ("1267", "3458"),
    ("1346", "2578"),
    ("1378", "2456"),
    ("1457", "2368"),
    ("1568", "2347"),
]


def _blade_axes(name: str) -> list[int]:
    return [int(ch) - 1 for ch in name]


def _exponential_family(base: FlowState, pair_index: int) -> DeformationFamily:
    grow, _shrink = _ASD_PAIRS[pair_index]
    weights = np.full(8, -0.25)
    weights[_blade_axes(grow)] = 0.25

    base_phi = base.phi
    base_g = base.metric.matrix

    def frame_map(s: float) -> np.ndarray:
        return np.diag(np.exp(s * weights))

    def phi_of_s(s: float) -> Form:
        return pullback(frame_map(s), base_phi)

    def metric_of_s(s: float) -> Metric:
        lin = frame_map(s)
        return Metric(lin.T @ base_g @ lin)

    # d/ds at 0 multiplies each blade coefficient by its total axis weight
    rates = np.array([sum(weights[i] for i in _blade_axes(name)) for name in _DEG4_NAMES])
    return DeformationFamily(
        name=f"asd-exp-{pair_index}",
        phi_of_s=phi_of_s,
        metric_of_s=metric_of_s,
        direction=Form(4, rates * base_phi.coeffs),
    )


def _first_order_family(base: FlowState) -> DeformationFamily:
    sign = -1.0 if base.phi.coefficient("1235") < 0 else 1.0
    direction = Form.from_blades(4, {"1234": sign, "5678": -sign})
    g_dot = np.zeros((8, 8))
    for (i, j), value in {(0, 6): -0.5, (1, 5): 0.5, (2, 7): -0.5, (3, 4): 0.5}.items():
        g_dot[i, j] = value
        g_dot[j, i] = value
    base_phi = base.phi
    base_g = base.metric.matrix

    def phi_of_s(s: float) -> Form:
        return base_phi + direction * s

    def metric_of_s(s: float) -> Metric:
        return Metric(base_g + s * g_dot)

    return DeformationFamily(
        name="first-order",
        phi_of_s=phi_of_s,
        metric_of_s=metric_of_s,
        direction=direction,
    )


def _omega47_family(base: FlowState) -> DeformationFamily:
    sign = -1.0 if base.phi.coefficient("1235") < 0 else 1.0
    cos_part = Form.from_blades(
        4,
        {
            "2347": -sign, "2368": sign, "2456": sign, "2578": -sign,
            "1346": -sign, "1378": sign, "1457": sign, "1568": sign,
        },
    )
    sin_part = Form.from_blades(
        4,
        {
            "2346": sign, "2378": sign, "2457": sign, "2568": sign,
            "1347": -sign, "1368": -sign, "1456": -sign, "1578": sign,
        },
    )
    base_phi = base.phi
    base_metric = base.metric

    def phi_of_s(s: float) -> Form:
        return base_phi + cos_part * (1.0 - math.cos(s)) + sin_part * math.sin(s)

    def metric_of_s(_s: float) -> Metric:
        return base_metric

    return DeformationFamily(
        name="omega47",
        phi_of_s=phi_of_s,
        metric_of_s=metric_of_s,
        direction=sin_part,
    )


def builtin_families(base: FlowState) -> list[DeformationFamily]:
    """The named deformation families through the SU(3) scenario state.

    Seven exponential pair-stretch families (asd-exp-0 ... asd-exp-6), the
    first-order anti-self-dual family, and the metric-fixing omega47 family.
    Rejects any other base state.
    """
    from .scenarios import su3

    reference = su3().structure()
    if (
        np.abs(np.abs(base.phi.coeffs) - np.abs(reference.phi.coeffs)).max() > 1e-8
        or np.abs(base.metric.matrix - reference.metric.matrix).max() > 1e-8
    ):
        raise ValueError("builtin deformation families are defined for the su3 base only")
    families = [_exponential_family(base, i) for i in range(len(_ASD_PAIRS))]
    families.append(_first_order_family(base))
    families.append(_omega47_family(base))
    return families
