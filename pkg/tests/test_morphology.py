import numpy as np
import pytest
from scipy.integrate import solve_ivp

from boundtransport.common.constants import SurfaceAreaMethod
from boundtransport.common.errors import (
    DegenerateTensorError,
    InstabilityError,
    SaturationError,
)
from boundtransport.physics.morphology import (
    area_strain,
    distortion,
    effective_stress,
    ellipsoid_area,
    embed_gradient,
    integrate_local,
    morphology_rhs,
    semi_axes,
    steady_morphology,
)
from boundtransport.schemas.physics.params import MorphologyParams

P = MorphologyParams()


def shear(rate: float) -> np.ndarray:
    grad = np.zeros((3, 3))
    grad[0, 1] = rate
    return grad


def random_spd(rng, n: int = 3) -> np.ndarray:
    A = rng.normal(size=(n, n))
    return A @ A.T + n * np.eye(n)


def random_rotation(rng) -> np.ndarray:
    Q, R = np.linalg.qr(rng.normal(size=(3, 3)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0.0:
        Q[:, 0] *= -1.0
    return Q


def test_sphere_at_rest_is_stationary():
    np.testing.assert_allclose(morphology_rhs(np.eye(3), np.zeros((3, 3)), P), 0.0, atol=1e-15)


def test_sphere_under_rotation_is_stationary():
    grad = np.array([[0.0, -3.0, 0.0], [3.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    np.testing.assert_allclose(morphology_rhs(np.eye(3), grad, P), 0.0, atol=1e-15)


def test_vanishing_invariant_is_rejected():
    with pytest.raises(DegenerateTensorError):
        morphology_rhs(np.zeros((3, 3)), np.zeros((3, 3)), P)


def test_rhs_preserves_volume_to_first_order(rng):
    # tr(S⁻¹ dS/dt) = 0 for traceless velocity gradients
    S = random_spd(rng)
    grad = rng.normal(size=(3, 3))
    grad -= np.trace(grad) / 3.0 * np.eye(3)
    rate = np.trace(np.linalg.solve(S, morphology_rhs(S, grad, P)))
    assert abs(rate) < 1e-12 * np.linalg.norm(grad)


def test_rhs_is_rotation_equivariant(rng):
    S = random_spd(rng)
    grad = rng.normal(size=(3, 3))
    Q = random_rotation(rng)
    lhs = morphology_rhs(Q @ S @ Q.T, Q @ grad @ Q.T, P)
    rhs = Q @ morphology_rhs(S, grad, P) @ Q.T
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * np.abs(rhs).max())


def test_determinant_drift_under_strong_shear():
    S = integrate_local(np.eye(3), shear(1000.0), t_end=1.0, dt=1e-4, p=P)
    assert abs(np.linalg.det(S) - 1.0) < 1e-6


def test_relaxation_matches_adaptive_reference():
    S0 = np.diag([2.0, 1.0, 0.5])
    S = integrate_local(S0, np.zeros((3, 3)), t_end=1.0, dt=1e-3, p=P)

    def f(_, y):
        return morphology_rhs(y.reshape(3, 3), np.zeros((3, 3)), P).ravel()

    reference = solve_ivp(f, (0.0, 1.0), S0.ravel(), rtol=1e-12, atol=1e-14).y[:, -1]
    np.testing.assert_allclose(S.ravel(), reference, rtol=1e-8, atol=1e-12)
    assert np.linalg.det(S) == pytest.approx(1.0, rel=1e-9)


def test_rk4_error_is_fourth_order():
    S0 = np.diag([2.0, 1.0, 0.5])
    grad = shear(10.0)
    reference = integrate_local(S0, grad, 0.5, 1e-3, P)
    coarse = np.abs(integrate_local(S0, grad, 0.5, 0.02, P) - reference).max()
    fine = np.abs(integrate_local(S0, grad, 0.5, 0.01, P) - reference).max()
    assert 12.0 < coarse / fine < 20.0


def test_steady_shear_state_has_vanishing_rate():
    S = integrate_local(np.eye(3), shear(1000.0), t_end=20.0, dt=5e-3, p=P, steady_tol=1e-10)
    assert np.linalg.norm(morphology_rhs(S, shear(1000.0), P)) < 1e-10
    L, W = semi_axes(S)
    assert L > 1.0 > W


def test_batched_integration_matches_single_tensors(rng):
    grads = np.stack([shear(100.0), np.zeros((3, 3)), shear(500.0)])
    S0 = np.stack([random_spd(rng) for _ in range(3)])
    batch = integrate_local(S0, grads, 0.2, 1e-3, P)
    for k in range(3):
        single = integrate_local(S0[k], grads[k], 0.2, 1e-3, P)
        np.testing.assert_allclose(batch[k], single, rtol=1e-13, atol=1e-14)


def test_loss_of_definiteness_is_reported():
    with pytest.raises(InstabilityError):
        integrate_local(np.diag([1.0, 1.0, -1.0]), np.zeros((3, 3)), 1.0, 0.1, P)


def test_semi_axes_and_distortion():
    L, W = semi_axes(np.diag([4.0, 1.0, 1.0]))
    assert (L, W) == pytest.approx((2.0, 1.0))
    assert distortion(L, W) == pytest.approx(1.0 / 3.0)


def test_effective_stress_at_half_distortion():
    expected = 2.0 * 0.035 * 5.0 * 0.5 / (0.75 * 4.2298e-4)
    assert effective_stress(0.5, 0.035, P) == pytest.approx(expected, rel=1e-14)
    assert effective_stress(0.0, 0.035, P) == 0.0


def test_effective_stress_saturates():
    with pytest.raises(SaturationError):
        effective_stress(1.0, 0.035, P)


@pytest.mark.parametrize("method", list(SurfaceAreaMethod))
def test_area_strain_of_scaled_sphere(method):
    assert area_strain(np.eye(3), 4.0 * np.pi, method) == pytest.approx(0.0, abs=1e-14)
    assert area_strain(4.0 * np.eye(3), 4.0 * np.pi, method) == pytest.approx(3.0, rel=1e-13)


def test_exact_area_of_prolate_spheroid():
    a, b = 2.0, 1.0
    e = np.sqrt(1.0 - b**2 / a**2)
    expected = 2.0 * np.pi * b**2 * (1.0 + a / (b * e) * np.arcsin(e))
    exact = ellipsoid_area(a, b, b, SurfaceAreaMethod.EXACT)
    assert exact == pytest.approx(expected, rel=1e-12)
    assert ellipsoid_area(a, b, b) == pytest.approx(expected, rel=0.011)


def test_area_strain_rejects_nonpositive_reference():
    with pytest.raises(ValueError):
        area_strain(np.eye(3), 0.0)


def test_steady_morphology_embeds_planar_gradients():
    grads = np.stack([np.array([[0.0, 200.0], [0.0, 0.0]]), np.zeros((2, 2))])
    S = steady_morphology(grads, P, t_end=0.5, dt=1e-3)
    assert S.shape == (2, 3, 3)
    np.testing.assert_allclose(S[1], np.eye(3), atol=1e-14)
    assert embed_gradient(grads).shape == (2, 3, 3)
