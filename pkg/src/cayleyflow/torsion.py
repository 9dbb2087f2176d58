"""Torsion of an invariant Cayley structure.

The torsion of a structure 4-form phi with metric g is the 2-form-valued
1-tensor T with nabla_m phi = T_m <> phi, where <> is the blade action of
``cayley.CayleyStructure.diamond``.  Because the blade action kills the
21-dimensional eigenspace, T is pinned down by requiring each row T_m to
lie in the 7-dimensional eigenspace; both construction routes below
produce that canonical representative.

Two independent routes are provided:

* ``torsion_tensor_nabla`` contracts nabla(phi) against phi directly;
* ``torsion_tensor_from_forms`` assembles T from the exterior-derivative
  data (T1_8, T5_48) via the auxiliary 3-form
  ``-(1/6) * star(T1_8 ^ phi) + star(T5_48)``.

Their agreement on every admissible state is one of the package's core
cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cayley import CayleyStructure
from .exterior import (
    Form,
    Metric,
    form_from_tensor,
    frame_interior,
    tensor_from_form,
    wedge,
)
from .homogeneous import InvariantGeometry, LieAlgebraData


@dataclass(frozen=True, eq=False)
class TorsionData:
    """Torsion tensor plus the exterior-derivative torsion forms.

    T[m][a][b] is antisymmetric in (a, b) and each row is a 2-form in the
    7-dimensional eigenspace; T1_8 and T5_48 split d(phi) as
    d(phi) = T1_8 ^ phi + T5_48; T8 is the metric trace
    (T8)_j = T_{i;jk} g^{ik}, and equals -(7/16) T1_8.
    """

    T: np.ndarray
    T1_8: Form
    T5_48: Form
    T8: Form

    def rows(self) -> list[Form]:
        """The eight torsion rows as 2-forms."""
        return [form_from_tensor(2, self.T[m]) for m in range(8)]


def torsion_forms(structure: CayleyStructure, algebra: LieAlgebraData) -> tuple[Form, Form]:
    """Split d(phi) = T1_8 ^ phi + T5_48 with T1_8 = (1/7) star(delta(phi) ^ phi).

    The 5-form remainder T5_48 satisfies star(T5_48) ^ phi = 0.
    """
    g = structure.metric
    phi = structure.phi
    dphi = algebra.d(phi)
    # delta(phi) = -star d star(phi) = -star d(phi) by self-duality.
    delta_phi = -g.star(dphi)
    t1 = g.star(wedge(delta_phi, phi)) / 7.0
    t5 = dphi - wedge(t1, phi)
    return t1, t5


def _t8_form(T: np.ndarray, metric: Metric) -> Form:
    return Form(1, np.einsum("ijk,ik->j", T, metric.inverse))


def torsion_tensor_nabla(structure: CayleyStructure, geo: InvariantGeometry) -> TorsionData:
    """Torsion by direct contraction: T_{m;ab} = (1/96) nabla_m(phi)_{ajkl} phi_{bpqr} g^{jp} g^{kq} g^{lr}."""
    gi = structure.metric.inverse
    phi_t = structure.phi_tensor
    nabla = geo.covariant_derivative(structure.phi)
    nabla_t = np.stack([tensor_from_form(f) for f in nabla])
    phi_up = np.einsum("bpqr,jp,kq,lr->bjkl", phi_t, gi, gi, gi, optimize=True)
    T = np.einsum("majkl,bjkl->mab", nabla_t, phi_up) / 96.0
    t1, t5 = torsion_forms(structure, geo.algebra)
    return TorsionData(T=T, T1_8=t1, T5_48=t5, T8=_t8_form(T, structure.metric))


def torsion_tensor_from_forms(structure: CayleyStructure, t1: Form, t5: Form) -> TorsionData:
    """Torsion from the derivative data: T_m = (1/2) pi2_7(e_m interior T^c).

    T^c = -(1/6) star(T1_8 ^ phi) + star(T5_48) is the 3-form carrying
    both torsion components.
    """
    g = structure.metric
    tc = g.star(wedge(t1, structure.phi)) * (-1.0 / 6.0) + g.star(t5)
    rows = [structure.pi2_7(Form(2, row)) * 0.5 for row in frame_interior(tc)]
    T = np.stack([tensor_from_form(row) for row in rows])
    return TorsionData(T=T, T1_8=t1, T5_48=t5, T8=_t8_form(T, g))


def div_T(t: TorsionData, geo: InvariantGeometry) -> Form:
    """(div T)_{jk} = g^{nm} nabla_n T_{m;jk}, a 2-form in the 7-eigenspace."""
    nabla_T = geo.covariant_derivative_tensor(t.T)
    return form_from_tensor(2, np.einsum("nm,nmjk->jk", geo.metric.inverse, nabla_T))


def torsion_norm_sq(t: TorsionData, metric: Metric) -> float:
    """Full metric contraction |T|^2 = T_{m;ab} T_{n;cd} g^{mn} g^{ac} g^{bd}."""
    gi = metric.inverse
    return float(np.einsum("mab,ncd,mn,ac,bd->", t.T, t.T, gi, gi, gi, optimize=True))


def is_balanced(t: TorsionData, metric: Metric, tol: float = 1e-10) -> bool:
    """True when the 1-form component of the torsion vanishes."""
    return metric.norm(t.T1_8) < tol


def is_locally_conformally_parallel(t: TorsionData, metric: Metric, tol: float = 1e-10) -> bool:
    """True when the 5-form component of the torsion vanishes."""
    return metric.norm(t.T5_48) < tol
