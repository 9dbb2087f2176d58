"""Cayley 4-form structures: admissibility, type decompositions, diamond, i/j.

The model 4-form on R^8 splits the exterior algebra into irreducible
pieces: Lambda^2 = 7 + 21, Lambda^3 = 8 + 48, Lambda^4 = 1 + 7 + 27 + 35,
with Lambda^5 mirroring Lambda^3 by duality.  The projectors here are
built directly from the structure form and the frame metric, so they
work in any (possibly non-orthonormal) invariant frame:

  * on 2-forms, *(Phi ∧ a) has eigenvalue 3 on the 7-part and -1 on the
    21-part;
  * the 35-part of a 4-form is its anti-self-dual half;
  * the 7-part of Lambda^4 is the diamond image of the 7-part of
    Lambda^2, projected Gram-orthogonally;
  * the 8-part of Lambda^3 is spanned by *(e^i ∧ Phi).

The diamond operation is the infinitesimal GL(8) action on 4-forms,
implemented slot-by-slot on the full coefficient tensor; its kernel is
exactly the 21-dimensional piece of Lambda^2.  The i/j maps identify
symmetric 2-tensors with the 1+35 part of Lambda^4 (j annihilates the
7+27 part).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exterior import (
    BLADE_COUNTS,
    DIM,
    Form,
    Metric,
    form_from_tensor,
    tensor_from_form,
    wedge,
)

# Reference structure form: one representative of the (unique) GL(8) orbit
# of admissible 4-forms, adapted to the identity metric.
REFERENCE_PHI_BLADES: dict[str, float] = {
    "1234": 1.0,
    "1256": 1.0,
    "1278": 1.0,
    "1357": 1.0,
    "1368": -1.0,
    "1458": -1.0,
    "1467": -1.0,
    "5678": 1.0,
    "3478": 1.0,
    "3456": 1.0,
    "2468": 1.0,
    "2457": -1.0,
    "2367": -1.0,
    "2358": -1.0,
}


def reference_cayley() -> Form:
    return Form.from_blades(4, REFERENCE_PHI_BLADES)


def _basis_one_form(a: int) -> Form:
    coeffs = np.zeros(DIM)
    coeffs[a] = 1.0
    return Form(1, coeffs)


@dataclass(frozen=True, eq=False)
class AdmissibilityReport:
    ok: bool
    borderline: bool
    residuals: dict[str, float]
    spectrum: np.ndarray

    @property
    def worst_residual(self) -> float:
        return max(self.residuals.values())


@dataclass(frozen=True, eq=False)
class CayleyStructure:
    """A 4-form and a compatible frame metric on the 8-dimensional algebra.

    Lazily cached projector matrices live in the instance __dict__ via
    cached_property (idempotent under concurrent recomputation).
    """

    phi: Form
    metric: Metric

    def __post_init__(self):
        if self.phi.degree != 4:
            raise ValueError("structure form must be a 4-form")

    @cached_property
    def phi_tensor(self) -> np.ndarray:
        return tensor_from_form(self.phi)

    @cached_property
    def norm_sq_phi(self) -> float:
        return self.metric.norm_sq(self.phi)

    # --- Lambda^2 = 7 + 21 --------------------------------------------------

    @cached_property
    def two_form_operator(self) -> np.ndarray:
        """Matrix of a -> *(phi ∧ a) on 2-forms; eigenvalues 3 (x7), -1 (x21)."""
        mat = np.zeros((BLADE_COUNTS[6], BLADE_COUNTS[2]))
        for j in range(BLADE_COUNTS[2]):
            basis = Form(2, np.eye(BLADE_COUNTS[2])[j])
            mat[:, j] = wedge(self.phi, basis).coeffs
        return self.metric.star_matrix(6) @ mat

    @cached_property
    def pi2_7_matrix(self) -> np.ndarray:
        return (np.eye(BLADE_COUNTS[2]) + self.two_form_operator) / 4.0

    @cached_property
    def pi2_21_matrix(self) -> np.ndarray:
        return (3.0 * np.eye(BLADE_COUNTS[2]) - self.two_form_operator) / 4.0

    def pi2_7(self, a: Form) -> Form:
        return Form(2, self.pi2_7_matrix @ a.coeffs)

    def pi2_21(self, a: Form) -> Form:
        return Form(2, self.pi2_21_matrix @ a.coeffs)

    # --- Lambda^3 = 8 + 48 ----------------------------------------------------

    @cached_property
    def _three_form_basis(self) -> np.ndarray:
        """Columns *(e^i ∧ phi), spanning the 8-dimensional piece."""
        cols = [
            self.metric.star(wedge(_basis_one_form(a), self.phi)).coeffs for a in range(DIM)
        ]
        return np.stack(cols, axis=1)

    @cached_property
    def pi3_8_matrix(self) -> np.ndarray:
        b = self._three_form_basis
        gram = self.metric.gram(3)
        return b @ np.linalg.solve(b.T @ gram @ b, b.T @ gram)

    def pi3_8(self, a: Form) -> Form:
        return Form(3, self.pi3_8_matrix @ a.coeffs)

    def pi3_48(self, a: Form) -> Form:
        return Form(3, a.coeffs - self.pi3_8_matrix @ a.coeffs)

    # --- Lambda^4 = 1 + 7 + 27 + 35 -------------------------------------------

    @cached_property
    def pi4_1_matrix(self) -> np.ndarray:
        weights = self.metric.gram(4) @ self.phi.coeffs
        return np.outer(self.phi.coeffs, weights) / self.norm_sq_phi

    @cached_property
    def pi4_35_matrix(self) -> np.ndarray:
        return (np.eye(BLADE_COUNTS[4]) - self.metric.star_matrix(4)) / 2.0

    @cached_property
    def pi4_7_matrix(self) -> np.ndarray:
        p27 = self.pi2_7_matrix
        u, s, _ = np.linalg.svd(p27)
        basis2 = u[:, : int((s > 1e-8).sum())]  # rank-7 image of the 2-form projector
        cols = [self.diamond(tensor_from_form(Form(2, basis2[:, i]))).coeffs for i in range(basis2.shape[1])]
        b = np.stack(cols, axis=1)
        gram = self.metric.gram(4)
        return b @ np.linalg.solve(b.T @ gram @ b, b.T @ gram)

    @cached_property
    def pi4_27_matrix(self) -> np.ndarray:
        return (
            np.eye(BLADE_COUNTS[4])
            - self.pi4_1_matrix
            - self.pi4_7_matrix
            - self.pi4_35_matrix
        )

    def pi4_1(self, a: Form) -> Form:
        return Form(4, self.pi4_1_matrix @ a.coeffs)

    def pi4_7(self, a: Form) -> Form:
        return Form(4, self.pi4_7_matrix @ a.coeffs)

    def pi4_27(self, a: Form) -> Form:
        return Form(4, self.pi4_27_matrix @ a.coeffs)

    def pi4_35(self, a: Form) -> Form:
        return Form(4, self.pi4_35_matrix @ a.coeffs)

    # --- diamond ---------------------------------------------------------------

    def diamond(self, a: np.ndarray) -> Form:
        """Infinitesimal action of an endomorphism (as a 2-tensor) on phi.

        (a ⋄ phi)_{ijkl} = a_{ip} g^{pq} phi_{qjkl} + (three more slots).
        Symmetric a moves the metric; the skew kernel is the 21-part of
        Lambda^2.
        """
        m = np.asarray(a, dtype=np.float64) @ self.metric.inverse
        t = self.phi_tensor
        out = (
            np.einsum("iq,qjkl->ijkl", m, t)
            + np.einsum("jq,iqkl->ijkl", m, t)
            + np.einsum("kq,ijql->ijkl", m, t)
            + np.einsum("lq,ijkq->ijkl", m, t)
        )
        return form_from_tensor(4, out)

    # --- i / j maps --------------------------------------------------------------

    @cached_property
    def _sym_basis_pairs(self) -> list[tuple[int, int]]:
        return [(a, a) for a in range(DIM)] + [
            (a, b) for a in range(DIM) for b in range(a + 1, DIM)
        ]

    @cached_property
    def i_map_matrix(self) -> np.ndarray:
        """70x36 matrix of h -> 2 h_ij e^i ∧ *(e^j ∧ phi) on the sym basis."""
        star_cols = [
            self.metric.star(wedge(_basis_one_form(a), self.phi)) for a in range(DIM)
        ]
        cols = []
        for a, b in self._sym_basis_pairs:
            col = wedge(_basis_one_form(a), star_cols[b]) + wedge(_basis_one_form(b), star_cols[a])
            cols.append(col.coeffs)
        return np.stack(cols, axis=1)

    @cached_property
    def j_map_matrix(self) -> np.ndarray:
        return np.linalg.pinv(self.i_map_matrix) @ (
            self.pi4_1_matrix + self.pi4_35_matrix
        )

    def _sym_to_vec(self, h: np.ndarray) -> np.ndarray:
        h = np.asarray(h, dtype=np.float64)
        vec = [h[a, a] for a in range(DIM)]
        vec += [2.0 * h[a, b] for a in range(DIM) for b in range(a + 1, DIM)]
        return np.array(vec)

    def _vec_to_sym(self, vec: np.ndarray) -> np.ndarray:
        h = np.zeros((DIM, DIM))
        for value, (a, b) in zip(vec, self._sym_basis_pairs):
            if a == b:
                h[a, a] = value
            else:
                h[a, b] = h[b, a] = value / 2.0
        return h

    def i_map(self, h: np.ndarray) -> Form:
        """Symmetric 2-tensors into the 1+35 part of Lambda^4."""
        return Form(4, self.i_map_matrix @ self._sym_to_vec(h))

    def j_map(self, a: Form) -> np.ndarray:
        """Left inverse of i on 1+35; annihilates the 7+27 part."""
        return self._vec_to_sym(self.j_map_matrix @ a.coeffs)

    # --- 5-form decomposition ------------------------------------------------------

    def decompose_5form(self, s: Form) -> tuple[Form, Form]:
        """Split a 5-form as eta ∧ phi + rest with eta the 8-part witness.

        Uses *(phi ∧ *(phi ∧ eta)) = -7 eta, so eta = -(1/7) * (phi ∧ *s).
        """
        if s.degree != 5:
            raise ValueError("decompose_5form expects a 5-form")
        eta = -(1.0 / 7.0) * self.metric.star(wedge(self.phi, self.metric.star(s)))
        rest = s - wedge(eta, self.phi)
        return eta, rest


def check_admissible(phi: Form, metric: Metric, tol: float = 1e-10) -> AdmissibilityReport:
    """Necessary conditions for phi to be an admissible structure form.

    Checks self-duality, the phi∧phi = 14 vol normalization, and the
    2-form operator spectrum {3 x7, -1 x21}.  `borderline` flags reports
    whose worst residual lies within a decade of the tolerance.
    """
    structure = CayleyStructure(phi, metric)
    star_phi = metric.star(phi)
    scale = max(1.0, float(np.abs(phi.coeffs).max()))
    self_dual = float(np.abs(star_phi.coeffs - phi.coeffs).max()) / scale
    square = wedge(phi, phi)
    wedge_residual = float(
        np.abs(square.coeffs[0] - 14.0 * metric.volume_form.coeffs[0])
    ) / max(1.0, 14.0 * metric.volume_form.coeffs[0])
    eigenvalues = np.sort(np.linalg.eigvals(structure.two_form_operator).real)
    target = np.concatenate([-np.ones(21), 3.0 * np.ones(7)])
    spectrum_residual = float(np.abs(eigenvalues - target).max())
    residuals = {
        "self_dual": self_dual,
        "wedge_square": wedge_residual,
        "spectrum": spectrum_residual,
    }
    worst = max(residuals.values())
    return AdmissibilityReport(
        ok=bool(worst < tol),
        borderline=bool(tol / 10.0 <= worst < tol),
        residuals=residuals,
        spectrum=eigenvalues,
    )
