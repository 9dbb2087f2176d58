"""Command-line interface: scenario checks, torsion reports, flows, probes.

Every subcommand loads a scenario (built-in name or JSON file), computes with
the library, and emits a deterministic JSON report (CSV for trajectories) to
stdout or ``--out``.  Exit codes: 0 success, 1 validation failure, 2 numerical
abort during integration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .cayley import check_admissible
from .dynamics import (
    FlowAborted,
    builtin_families,
    integrate,
    soliton_check,
    stability_probe,
)
from .exterior import Form
from .flow import RHS_FUNCTIONS, FlowState, t_star_t
from .scenarios import Scenario, ScenarioError, load_scenario
from .torsion import (
    div_T,
    is_balanced,
    is_locally_conformally_parallel,
    torsion_norm_sq,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2

DEFAULT_TOL = 1e-8
ZERO_MODE_TOL = 1e-6


def verification_tol() -> float:
    """Default verification tolerance, overridable via CAYLEY_FLOW_TOL."""
    raw = os.environ.get("CAYLEY_FLOW_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        return float(raw)
    except ValueError:
        raise ScenarioError(f"CAYLEY_FLOW_TOL: not a number: {raw!r}")


def state_of(scenario: Scenario) -> FlowState:
    return FlowState(phi=scenario.phi, metric=scenario.metric, algebra=scenario.algebra)


def _matrix(m: np.ndarray) -> list[list[float]]:
    return [[float(x) for x in row] for row in m]


def _blades(a: Form) -> dict[str, float]:
    return a.blade_dict(tol=1e-14)


def _soliton_payload(state: FlowState, rhs_kind: str) -> dict:
    report = soliton_check(state, rhs_kind)
    return {
        "is_soliton": report.is_soliton,
        "lambda": report.lam,
        "residual": report.residual,
        "classification": report.classification,
    }


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, out_path: str | None) -> None:
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", out_path)


# --- subcommands ---------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    tol = verification_tol()
    report = check_admissible(scenario.phi, scenario.metric, tol=tol)
    algebra = scenario.algebra
    payload = {
        "scenario": scenario.name,
        "tolerance": tol,
        "admissible": report.ok,
        "residuals": {key: float(value) for key, value in report.residuals.items()},
        "jacobi_residual": algebra.jacobi_residual,
        "unimodular": algebra.is_unimodular,
        "abelian": algebra.is_abelian,
    }
    _emit_json(payload, args.out)
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_torsion(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    state = state_of(scenario)
    torsion = state.torsion
    metric = state.metric
    geo = state.geometry
    payload = {
        "scenario": scenario.name,
        "one_form": _blades(torsion.T1_8),
        "five_form": _blades(torsion.T5_48),
        "trace_vector": _blades(torsion.T8),
        "rows": {str(m + 1): _blades(row) for m, row in enumerate(torsion.rows())},
        "divergence": _blades(div_T(torsion, geo)),
        "norm_sq": torsion_norm_sq(torsion, metric),
        "one_form_norm_sq": metric.norm_sq(torsion.T1_8),
        "five_form_norm_sq": metric.norm_sq(torsion.T5_48),
        "classes": {
            "parallel": bool(np.abs(torsion.T).max() < 1e-10),
            "balanced": is_balanced(torsion, metric),
            "locally_conformally_parallel": is_locally_conformally_parallel(torsion, metric),
        },
    }
    _emit_json(payload, args.out)
    return EXIT_OK


def cmd_rhs(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    state = state_of(scenario)
    rhs = RHS_FUNCTIONS[args.rhs](state)
    payload = {
        "scenario": scenario.name,
        "rhs": args.rhs,
        "velocity_tensor": _matrix(rhs.A),
        "metric_rate": _matrix(2.0 * rhs.h),
        "dphi": _blades(rhs.dPhi),
        "scalar_curvature": state.geometry.scalar_curvature,
        "torsion_norm_sq": torsion_norm_sq(state.torsion, state.metric),
        "soliton": _soliton_payload(state, args.rhs),
    }
    _emit_json(payload, args.out)
    return EXIT_OK


def cmd_soliton(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    state = state_of(scenario)
    payload = {
        "scenario": scenario.name,
        "rhs": args.rhs,
        **_soliton_payload(state, args.rhs),
    }
    _emit_json(payload, args.out)
    return EXIT_OK


def _trajectory_rows(states, rhs_kind: str, lam: float | None, tracked: list[str]):
    rhs_fn = RHS_FUNCTIONS[rhs_kind]
    rows = []
    for state in states:
        rhs = rhs_fn(state)
        metric = state.metric
        phi = state.phi
        lam_here = lam
        if lam_here is None:
            lam_here = metric.inner(rhs.dPhi, phi) / metric.norm_sq(phi)
        residual = metric.norm(rhs.dPhi - phi * lam_here)
        row = [state.time]
        row.extend(phi.coefficient(name) for name in tracked)
        row.extend(np.linalg.eigvalsh(metric.matrix).tolist())
        row.append(torsion_norm_sq(state.torsion, metric))
        row.append(state.geometry.scalar_curvature)
        row.append(residual)
        rows.append([float(x) for x in row])
    return rows


def cmd_integrate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    state = state_of(scenario)
    tracked = sorted(_blades(scenario.phi))
    columns = (
        ["t"]
        + [f"phi_{name}" for name in tracked]
        + [f"metric_eig_{i + 1}" for i in range(8)]
        + ["torsion_norm_sq", "scalar_curvature", "lambda_residual"]
    )

    def render(states) -> str:
        rows = _trajectory_rows(states, args.rhs, args.lam, tracked)
        if args.format == "json":
            payload = {
                "scenario": scenario.name,
                "rhs": args.rhs,
                "dt": args.dt,
                "columns": columns,
                "rows": rows,
            }
            return json.dumps(payload, indent=2, sort_keys=True) + "\n"
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(columns)
        writer.writerows([f"{x:.12g}" for x in row] for row in rows)
        return buffer.getvalue()

    try:
        trajectory = integrate(state, args.rhs, args.t_end, args.dt, lam=args.lam)
    except FlowAborted as aborted:
        _emit(render(aborted.trajectory.states), args.out)
        diagnostics = {
            "aborted_at": aborted.time,
            "reason": aborted.reason,
            "diagnostics": aborted.diagnostics,
        }
        sys.stderr.write(json.dumps(diagnostics, indent=2, sort_keys=True) + "\n")
        return EXIT_NUMERICAL
    _emit(render(trajectory.states), args.out)
    return EXIT_OK


def cmd_stability(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    state = state_of(scenario)
    families = {fam.name: fam for fam in builtin_families(state)}
    if args.family not in families:
        options = ", ".join(sorted(families))
        raise ScenarioError(f"unknown family {args.family!r}; expected one of {options}")
    fam = families[args.family]
    lam = args.lam
    if lam is None:
        lam = soliton_check(state, args.rhs).lam
    growth = stability_probe(state, fam, lam, args.rhs)
    pairing = growth / 2.0
    if abs(growth) < ZERO_MODE_TOL:
        classification = "zero mode"
    else:
        classification = "unstable" if growth > 0 else "stable"
    payload = {
        "scenario": scenario.name,
        "rhs": args.rhs,
        "family": fam.name,
        "lambda": lam,
        "growth_rate": growth,
        "pairing": pairing,
        "classification": classification,
    }
    _emit_json(payload, args.out)
    return EXIT_OK


def _golden_section(scenario: Scenario) -> tuple[dict, FlowState]:
    state = state_of(scenario)
    torsion = state.torsion
    rhs = RHS_FUNCTIONS["gradient"](state)
    section = {
        "ricci": _matrix(state.geometry.ricci),
        "t_star_t": _matrix(t_star_t(torsion, state.metric)),
        "torsion_norm_sq": torsion_norm_sq(torsion, state.metric),
        "velocity_tensor": _matrix(rhs.A),
        "soliton": {
            kind: _soliton_payload(state, kind)
            for kind in ("gradient", "harmonic", "ricci-harmonic")
        },
    }
    return section, state


def cmd_reproduce(args: argparse.Namespace) -> int:
    names = [args.scenario] if args.scenario else ["su3", "hk-t5"]
    report: dict = {}
    for name in names:
        scenario = load_scenario(name)
        section, state = _golden_section(scenario)
        report[scenario.name] = section
        if scenario.name == "su3":
            renormalisation = -3.0
            stability = {"lambda": renormalisation}
            for fam in builtin_families(state):
                if fam.name in ("asd-exp-0", "first-order", "omega47"):
                    stability[fam.name] = stability_probe(state, fam, renormalisation) / 2.0
            report["stability"] = stability
    _emit_json(report, args.out)
    return EXIT_OK


# --- parser ---------------------------------------------------------------------


def _add_scenario_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "scenario",
        nargs="?",
        default=None,
        help="built-in scenario name or path to a scenario JSON file",
    )
    parser.add_argument(
        "--scenario",
        "-s",
        dest="scenario_flag",
        default=None,
        help="alternative way to pass the scenario",
    )
    parser.add_argument("--out", default=None, help="write the report to this file")
    parser.set_defaults(scenario_required=True)


def _add_rhs_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--rhs",
        choices=sorted(RHS_FUNCTIONS),
        default="gradient",
        help="velocity law (default: gradient)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cayley-flow",
        description="Torsion flows of Cayley 4-form structures on homogeneous 8-manifolds.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("verify", help="admissibility and algebra checks")
    _add_scenario_arg(p)
    p.set_defaults(func=cmd_verify)

    p = subparsers.add_parser("torsion", help="torsion tensor, forms, and classes")
    _add_scenario_arg(p)
    p.set_defaults(func=cmd_torsion)

    p = subparsers.add_parser("rhs", help="flow velocity at the initial state")
    _add_scenario_arg(p)
    _add_rhs_arg(p)
    p.set_defaults(func=cmd_rhs)

    p = subparsers.add_parser("integrate", help="integrate the flow, write a trajectory table")
    _add_scenario_arg(p)
    _add_rhs_arg(p)
    p.add_argument("--t-end", type=float, required=True, help="final flow time")
    p.add_argument("--dt", type=float, required=True, help="RK4 step size")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="integrate the renormalised flow with this constant")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_integrate)

    p = subparsers.add_parser("soliton", help="test the state against the soliton equation")
    _add_scenario_arg(p)
    _add_rhs_arg(p)
    p.set_defaults(func=cmd_soliton)

    p = subparsers.add_parser("stability", help="probe a deformation family of the state")
    _add_scenario_arg(p)
    _add_rhs_arg(p)
    p.add_argument("--family", required=True, help="built-in deformation family name")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="renormalisation constant (default: soliton projection)")
    p.set_defaults(func=cmd_stability)

    p = subparsers.add_parser("reproduce", help="golden tables for the built-in scenarios")
    _add_scenario_arg(p)
    p.set_defaults(func=cmd_reproduce, scenario_required=False)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "scenario_flag", None):
        if args.scenario is not None and args.scenario != args.scenario_flag:
            parser.error("scenario given both positionally and via --scenario")
        args.scenario = args.scenario_flag
    if getattr(args, "scenario_required", False) and args.scenario is None:
        parser.error("a scenario is required (positional or --scenario)")
    try:
        return args.func(args)
    except ScenarioError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
