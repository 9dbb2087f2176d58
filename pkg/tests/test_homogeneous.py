"""Lie-algebra data, invariant exterior derivative, Levi-Civita geometry."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_form, random_metric
from cayleyflow.exterior import DIM, Form, Metric, pullback, wedge
from cayleyflow.homogeneous import (
    InvariantGeometry,
    LieAlgebraData,
    codifferential,
    invariant_d,
    levi_civita,
    lie_derivative_metric,
    rotate_frame,
)
from cayleyflow.scenarios import hk_t5, su3, torus

S3 = np.sqrt(3.0)


def _su3_matrices() -> np.ndarray:
    """The defining orthonormal basis of su(3): anti-Hermitian traceless 3x3."""
    i = 1j
    s = 1.0 / np.sqrt(12.0)
    m = np.zeros((8, 3, 3), dtype=complex)
    m[0] = np.diag([i, 0.0, -i]) * s
    m[1] = np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 0]]) * s
    m[2] = np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]]) * s
    m[3] = np.array([[0, 0, 0], [0, 0, 1], [0, -1, 0]]) * s
    m[4] = np.diag([i, -2 * i, i]) / 6.0
    m[5] = np.array([[0, i, 0], [i, 0, 0], [0, 0, 0]]) * s
    m[6] = np.array([[0, 0, i], [0, 0, 0], [i, 0, 0]]) * s
    m[7] = np.array([[0, 0, 0], [0, 0, i], [0, i, 0]]) * s
    return m


def test_su3_basis_is_orthonormal_for_minus_six_trace():
    m = _su3_matrices()
    gram = np.array([[-6.0 * np.trace(a @ b).real for b in m] for a in m])
    assert np.allclose(gram, np.eye(8), atol=1e-13)
    for a in m:
        assert np.allclose(a + a.conj().T, 0.0, atol=1e-15)  # anti-Hermitian
        assert abs(np.trace(a)) < 1e-15


def test_su3_constants_match_matrix_commutators():
    """[e_i, e_j] = c^k_{ij} e_k holds exactly for the 3x3 realization."""
    m = _su3_matrices()
    c = su3().algebra.structure_constants
    for i in range(8):
        for j in range(8):
            comm = m[i] @ m[j] - m[j] @ m[i]
            recon = np.einsum("k,kab->ab", c[:, i, j], m)
            assert np.allclose(comm, recon, atol=1e-13), (i, j)


def test_su3_exterior_derivative_rows():
    alg = su3().algebra
    e5 = Form.from_blades(1, {"5": 1.0})
    assert alg.d(e5).blade_dict(tol=1e-14) == pytest.approx(
        {"26": -0.5, "48": 0.5}
    )
    e1 = Form.from_blades(1, {"1": 1.0})
    d1 = alg.d(e1).blade_dict(tol=1e-14)
    assert d1 == pytest.approx({"26": -S3 / 6, "37": -S3 / 3, "48": -S3 / 6})


def test_hk_exterior_derivative_rows():
    alg = hk_t5(1.0).algebra
    for name in ("1", "2", "3", "4", "5", "8"):
        closed = alg.d(Form.from_blades(1, {name: 1.0}))
        assert np.allclose(closed.coeffs, 0.0)
    d6 = alg.d(Form.from_blades(1, {"6": 1.0}))
    d7 = alg.d(Form.from_blades(1, {"7": 1.0}))
    assert d6.blade_dict(tol=1e-14) == {"68": -1.0}
    assert d7.blade_dict(tol=1e-14) == {"78": 1.0}
    # general k just scales the two rows
    dk = hk_t5(2.5).algebra.d(Form.from_blades(1, {"6": 1.0}))
    assert dk.blade_dict(tol=1e-14) == {"68": -2.5}


def test_algebra_flags():
    assert torus().algebra.is_abelian
    assert torus().algebra.is_unimodular
    assert not su3().algebra.is_abelian
    assert su3().algebra.is_unimodular
    assert hk_t5().algebra.is_unimodular  # trace of every ad is k - k = 0
    assert su3().algebra.jacobi_residual < 1e-14


def test_algebra_validation_errors():
    with pytest.raises(ValueError):
        LieAlgebraData(np.zeros((8, 8)))
    bad = np.zeros((8, 8, 8))
    bad[0, 1, 2] = 1.0  # not antisymmetric in the lower pair
    with pytest.raises(ValueError):
        LieAlgebraData(bad)
    broken = np.zeros((8, 8, 8))
    # [e1,e2] = e3 with [e1,e3] = e1 violates Jacobi on (e1,e2,e3)
    for (i, j, k) in ((0, 1, 2), (0, 2, 0)):
        broken[k, i, j] = 1.0
        broken[k, j, i] = -1.0
    with pytest.raises(ValueError):
        LieAlgebraData(broken)


def test_non_unimodular_algebra_is_flagged():
    c = np.zeros((8, 8, 8))
    c[0, 7, 0] = 1.0  # [e8, e1] = e1, so trace ad_{e8} = 1
    c[0, 0, 7] = -1.0
    alg = LieAlgebraData(c)
    assert not alg.is_unimodular
    assert alg.jacobi_residual < 1e-15


@given(st.integers(0, 6), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_d_squared_is_zero(degree, seed):
    rng = np.random.default_rng(seed)
    a = random_form(rng, degree)
    for scenario in (su3(), hk_t5(), torus()):
        dda = scenario.algebra.d(scenario.algebra.d(a))
        assert np.allclose(dda.coeffs, 0.0, atol=1e-12)


def test_invariant_d_equals_covariant_route():
    """d a = sum_m e^m wedge nabla_m a for invariant forms."""
    rng = np.random.default_rng(31)
    scenario = su3()
    geo = scenario.geometry()
    for degree in (1, 2, 3, 4):
        a = random_form(rng, degree)
        direct = invariant_d(a, scenario.algebra)
        rows = geo.covariant_derivative(a)
        total = Form.zero(degree + 1)
        for m in range(DIM):
            em = Form.from_blades(1, {str(m + 1): 1.0})
            total = total + wedge(em, rows[m])
        assert np.allclose(direct.coeffs, total.coeffs, atol=1e-12)


def test_christoffels_metric_compatible_and_torsion_free():
    for scenario in (su3(), hk_t5(0.7)):
        geo = scenario.geometry()
        gamma = geo.christoffels
        g = scenario.metric.matrix
        c = scenario.algebra.structure_constants
        # nabla g = 0: Gamma[m, i, :] g[:, j] antisymmetric in (i, j)
        grad = np.einsum("mik,kj->mij", gamma, g)
        assert np.allclose(grad + np.transpose(grad, (0, 2, 1)), 0.0, atol=1e-12)
        # torsion-free: Gamma^k_{ij} - Gamma^k_{ji} = c^k_{ij}
        skew = np.transpose(gamma, (2, 0, 1)) - np.transpose(gamma, (2, 1, 0))
        assert np.allclose(skew, c, atol=1e-12)


def test_levi_civita_random_metric_keeps_invariants():
    rng = np.random.default_rng(32)
    alg = su3().algebra
    g = random_metric(rng)
    geo = levi_civita(alg, g)
    gamma = geo.christoffels
    grad = np.einsum("mik,kj->mij", gamma, g.matrix)
    assert np.allclose(grad + np.transpose(grad, (0, 2, 1)), 0.0, atol=1e-11)


def test_torus_is_flat():
    geo = torus().geometry()
    assert np.allclose(geo.christoffels, 0.0)
    assert np.allclose(geo.curvature, 0.0)
    assert np.allclose(geo.ricci, 0.0)
    assert geo.scalar_curvature == 0.0


def test_ricci_goldens():
    su3_ric = su3().geometry().ricci
    assert np.allclose(su3_ric, 0.25 * np.eye(8), atol=1e-12)
    assert su3().geometry().scalar_curvature == pytest.approx(2.0, abs=1e-12)
    hk_ric = hk_t5().geometry().ricci
    expected = np.zeros((8, 8))
    expected[7, 7] = -2.0
    assert np.allclose(hk_ric, expected, atol=1e-12)
    assert hk_t5().geometry().scalar_curvature == pytest.approx(-2.0, abs=1e-12)


def test_ricci_is_symmetric_for_random_metrics():
    rng = np.random.default_rng(33)
    for scenario in (su3(), hk_t5()):
        for _ in range(3):
            geo = InvariantGeometry(scenario.algebra, random_metric(rng))
            assert np.allclose(geo.ricci, geo.ricci.T, atol=1e-10)


def test_su3_metric_is_bi_invariant():
    """Every ad_X is skew for the builtin metric, so constant fields are Killing."""
    c = su3().algebra.structure_constants
    g = su3().metric.matrix
    lowered = np.einsum("kij,kl->ijl", c, g)  # <[e_i, e_j], e_l>
    assert np.allclose(lowered, -np.transpose(lowered, (0, 2, 1)), atol=1e-13)
    geo = su3().geometry()
    for m in range(8):
        v = np.zeros(8)
        v[m] = 1.0
        assert np.allclose(lie_derivative_metric(v, geo), 0.0, atol=1e-13)


def test_hk_frame_fields_are_not_all_killing():
    geo = hk_t5().geometry()
    v = np.zeros(8)
    v[7] = 1.0  # the non-closed directions stretch under the eighth field
    lie = lie_derivative_metric(v, geo)
    expected = np.zeros((8, 8))
    expected[5, 5] = 2.0
    expected[6, 6] = -2.0
    assert np.allclose(lie, expected, atol=1e-13)


def test_codifferential_is_adjoint_to_d():
    """<d a, b> = <a, delta b> on unimodular algebras, any invariant metric."""
    rng = np.random.default_rng(34)
    for scenario in (su3(), hk_t5(1.3), torus()):
        assert scenario.algebra.is_unimodular
        for metric in (scenario.metric, random_metric(rng)):
            geo = InvariantGeometry(scenario.algebra, metric)
            for _ in range(4):
                k = int(rng.integers(0, 7))
                a, b = random_form(rng, k), random_form(rng, k + 1)
                lhs = metric.inner(geo.d(a), b)
                rhs = metric.inner(a, codifferential(b, geo))
                assert lhs == pytest.approx(rhs, abs=1e-10 * max(1.0, abs(lhs)))


def test_codifferential_squares_to_zero():
    rng = np.random.default_rng(35)
    geo = su3().geometry()
    a = random_form(rng, 4)
    dd = geo.codifferential(geo.codifferential(a))
    assert np.allclose(dd.coeffs, 0.0, atol=1e-11)


def _random_rotation(rng: np.random.Generator) -> np.ndarray:
    q, _ = np.linalg.qr(rng.normal(size=(8, 8)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def test_rotate_frame_covariance():
    """Curvature data transforms tensorially under a change of frame."""
    rng = np.random.default_rng(36)
    scenario = su3()
    rot = _random_rotation(rng)
    new_alg, new_metric, (new_phi,) = rotate_frame(
        scenario.algebra, scenario.metric, rot, scenario.phi
    )
    assert new_alg.jacobi_residual < 1e-12
    geo = InvariantGeometry(scenario.algebra, scenario.metric)
    new_geo = InvariantGeometry(new_alg, new_metric)
    assert np.allclose(new_geo.ricci, rot.T @ geo.ricci @ rot, atol=1e-10)
    assert new_geo.scalar_curvature == pytest.approx(geo.scalar_curvature, rel=1e-10)
    # d commutes with the pullback of invariant forms
    a = random_form(rng, 2)
    lhs = new_alg.d(pullback(rot, a))
    rhs = pullback(rot, scenario.algebra.d(a))
    assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-11)
