"""Invariant geometry on a Lie group from structure constants alone.

A left-invariant frame e_1..e_8 turns all geometry into linear algebra:
the bracket [e_i, e_j] = c^k_{ij} e_k determines the exterior derivative
on invariant forms (de^i = -1/2 c^i_{jk} e^{jk}), and together with a
frame metric the Levi-Civita connection via the Koszul formula

    2 g(nabla_{e_i} e_j, e_k) = c_{ijk} - c_{jki} + c_{kij},

with c_{ijk} = g([e_i, e_j], e_k).  Covariant derivatives of invariant
tensors reduce to -Gamma contractions, and the curvature tensor to a
quadratic expression in Gamma and c.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exterior import (
    AXES,
    BLADE_COUNTS,
    BLADES,
    DIM,
    Form,
    INDEX_IN_DEGREE,
    Metric,
    SIGN_MERGE,
    derivation_matrix,
    pullback,
)

JACOBI_TOL = 1e-10
CONNECTION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LieAlgebraData:
    """Structure constants c[k, i, j] with [e_i, e_j] = c[k, i, j] e_k."""

    structure_constants: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.structure_constants, dtype=np.float64)
        object.__setattr__(self, "structure_constants", c)
        if c.shape != (DIM, DIM, DIM):
            raise ValueError("structure constants must be an 8x8x8 array")
        if not np.array_equal(c, -np.swapaxes(c, 1, 2)):
            raise ValueError("structure constants must be antisymmetric in the lower indices")
        if self.jacobi_residual > JACOBI_TOL:
            raise ValueError(f"Jacobi identity violated (residual {self.jacobi_residual:.3e})")

    @cached_property
    def jacobi_residual(self) -> float:
        c = self.structure_constants
        # [[e_i, e_j], e_k] summed over cyclic permutations of (i, j, k).
        term = np.einsum("mij,pmk->pijk", c, c)
        cyclic = term + np.transpose(term, (0, 2, 3, 1)) + np.transpose(term, (0, 3, 1, 2))
        return float(np.abs(cyclic).max())

    @cached_property
    def is_abelian(self) -> bool:
        return not np.any(self.structure_constants)

    @cached_property
    def is_unimodular(self) -> bool:
        # tr(ad_{e_i}) = c[k, i, k]
        return bool(np.abs(np.einsum("kik->i", self.structure_constants)).max() < 1e-12)

    @cached_property
    def _d_matrices(self) -> dict[int, np.ndarray]:
        return {}

    def exterior_derivative_matrix(self, k: int) -> np.ndarray:
        """Matrix of d from degree k to k+1 on invariant forms."""
        mat = self._d_matrices.get(k)
        if mat is None:
            if k >= DIM:
                mat = np.zeros((0, BLADE_COUNTS[DIM]))
            else:
                c = self.structure_constants
                mat = np.zeros((BLADE_COUNTS[k + 1], BLADE_COUNTS[k]))
                for idx, mask in enumerate(BLADES[k]):
                    for pos, a in enumerate(AXES[k][idx]):
                        rest = int(mask) ^ (1 << int(a))
                        extract = -1.0 if pos & 1 else 1.0
                        # de^a = -sum_{j<k} c^a_{jk} e^{jk}
                        for jidx in range(DIM):
                            for kidx in range(jidx + 1, DIM):
                                coeff = -c[a, jidx, kidx]
                                if coeff == 0.0:
                                    continue
                                m2 = (1 << jidx) | (1 << kidx)
                                if m2 & rest:
                                    continue
                                sign = SIGN_MERGE[m2, rest]
                                mat[INDEX_IN_DEGREE[m2 | rest], idx] += extract * coeff * sign
            self._d_matrices[k] = mat
        return mat

    def d(self, a: Form) -> Form:
        if a.degree == DIM:
            return Form.zero(DIM)  # top degree: d vanishes (no degree 9)
        return Form(a.degree + 1, self.exterior_derivative_matrix(a.degree) @ a.coeffs)


@dataclass(frozen=True, eq=False)
class InvariantGeometry:
    """A Lie algebra together with a frame metric and its connection."""

    algebra: LieAlgebraData
    metric: Metric

    @cached_property
    def christoffels(self) -> np.ndarray:
        """Gamma[m, j, k] with nabla_{e_m} e_j = Gamma[m, j, k] e_k.

        Metric compatibility and torsion-freeness are asserted on every
        construction; both must hold to 1e-12 by the Koszul formula.
        """
        c = self.algebra.structure_constants
        g = self.metric.matrix
        cg = np.einsum("lab,lc->abc", c, g)  # c_{abc} = g([e_a, e_b], e_c)
        # 2 g(nabla_a e_b, e_c) = c_{abc} - c_{bca} + c_{cab}
        low = 0.5 * (cg - np.transpose(cg, (2, 0, 1)) + np.transpose(cg, (1, 2, 0)))
        residual_metric = np.abs(low + np.transpose(low, (0, 2, 1))).max()
        gamma = np.einsum("mjp,pk->mjk", low, self.metric.inverse)
        residual_torsion = np.abs(
            gamma - np.transpose(gamma, (1, 0, 2)) - np.transpose(c, (1, 2, 0))
        ).max()
        if residual_metric > CONNECTION_TOL or residual_torsion > CONNECTION_TOL:
            raise AssertionError(
                f"Koszul connection failed invariants: metric {residual_metric:.3e}, "
                f"torsion {residual_torsion:.3e}"
            )
        return gamma

    def d(self, a: Form) -> Form:
        return self.algebra.d(a)

    def codifferential(self, a: Form) -> Form:
        """delta = -*d* on every degree in dimension 8."""
        return -1.0 * self.metric.star(self.algebra.d(self.metric.star(a)))

    @cached_property
    def _covariant_matrices(self) -> dict[int, np.ndarray]:
        return {}

    def covariant_matrix(self, k: int) -> np.ndarray:
        """Stacked matrices (8, C_k, C_k) of nabla_{e_m} on invariant k-forms."""
        mats = self._covariant_matrices.get(k)
        if mats is None:
            gamma = self.christoffels
            mats = np.stack(
                [derivation_matrix(-gamma[m].T, k) for m in range(DIM)]
            )  # nabla_m e^a = -Gamma^a_{mb} e^b
            self._covariant_matrices[k] = mats
        return mats

    def covariant_derivative(self, a: Form) -> list[Form]:
        """The eight directional derivatives of an invariant form."""
        mats = self.covariant_matrix(a.degree)
        return [Form(a.degree, mats[m] @ a.coeffs) for m in range(DIM)]

    def covariant_derivative_tensor(self, tensor: np.ndarray) -> np.ndarray:
        """(nabla T)[m, a_1..a_r] for a fully covariant invariant tensor."""
        tensor = np.asarray(tensor, dtype=np.float64)
        r = tensor.ndim
        gamma = self.christoffels
        out = np.zeros((DIM,) + tensor.shape)
        letters = "abcdefgh"[:r]
        for s in range(r):
            src = letters[:s] + "p" + letters[s + 1 :]
            out -= np.einsum(f"m{letters[s]}p,{src}->m{letters}", gamma, tensor)
        return out

    def lie_derivative_metric(self, v: np.ndarray) -> np.ndarray:
        """(L_v g)_{ij} for an invariant vector field v (upper components)."""
        gamma = self.christoffels
        g = self.metric.matrix
        grad = np.einsum("k,ikp,pj->ij", np.asarray(v, dtype=np.float64), gamma, g)
        return grad + grad.T

    @cached_property
    def curvature(self) -> np.ndarray:
        """R[p, i, j, k] with R(e_i, e_j) e_k = R[p, i, j, k] e_p."""
        gamma = self.christoffels
        c = self.algebra.structure_constants
        quad = np.einsum("jkl,ilp->pijk", gamma, gamma)
        return quad - np.transpose(quad, (0, 2, 1, 3)) - np.einsum("mij,mkp->pijk", c, gamma)

    @cached_property
    def ricci(self) -> np.ndarray:
        """Ric[j, k] = trace of X -> R(X, e_j) e_k; symmetric for Levi-Civita."""
        return np.einsum("iijk->jk", self.curvature)

    @cached_property
    def scalar_curvature(self) -> float:
        return float(np.einsum("jk,jk->", self.metric.inverse, self.ricci))


def rotate_frame(
    algebra: LieAlgebraData, metric: Metric, rot: np.ndarray, *forms: Form
) -> tuple[LieAlgebraData, Metric, tuple[Form, ...]]:
    """Re-express everything in the frame f_j = rot[i, j] e_i.

    Invariant geometry is frame-covariant: all derived quantities computed
    in the rotated data must match the originals transported by rot.
    """
    rot = np.asarray(rot, dtype=np.float64)
    rot_inv = np.linalg.inv(rot)
    c = np.einsum(
        "km,mpq,pi,qj->kij", rot_inv, algebra.structure_constants, rot, rot
    )
    c = 0.5 * (c - np.transpose(c, (0, 2, 1)))  # restore exact antisymmetry
    new_algebra = LieAlgebraData(c)
    new_metric = Metric(rot.T @ metric.matrix @ rot)
    new_forms = tuple(pullback(rot, f) for f in forms)
    return new_algebra, new_metric, new_forms


# --- free-function layer ------------------------------------------------------


def invariant_d(a: Form, alg: LieAlgebraData) -> Form:
    """Exterior derivative of an invariant form, from the structure constants."""
    return alg.d(a)


def levi_civita(alg: LieAlgebraData, m: Metric) -> InvariantGeometry:
    """Invariant geometry with the Levi-Civita connection of (alg, m).

    Verifies metric compatibility and torsion-freeness of the connection
    coefficients to 1e-12 before returning.
    """
    geo = InvariantGeometry(alg, m)
    geo.christoffels  # construction asserts both invariants at 1e-12
    return geo


def codifferential(a: Form, geo: InvariantGeometry) -> Form:
    """Adjoint of d on invariant forms: the sign-corrected star-d-star."""
    return geo.codifferential(a)


def covariant_derivative(a: Form, geo: InvariantGeometry) -> list[Form]:
    """Frame-direction covariant derivatives [nabla_1 a, ..., nabla_8 a]."""
    return geo.covariant_derivative(a)


def lie_derivative_metric(v: np.ndarray, geo: InvariantGeometry) -> np.ndarray:
    """(L_v g)_ij for a frame vector v, as a symmetric matrix."""
    return geo.lie_derivative_metric(v)
