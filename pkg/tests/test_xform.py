import numpy as np
import pytest

from boundtransport.common.constants import TransformKind
from boundtransport.common.errors import DomainError, UnsupportedTransformError
from boundtransport.physics.xform import (
    inflow_value,
    to_physical,
    to_transformed,
    transformed_source,
)
from boundtransport.schemas.physics.params import Transform

UPPER = Transform(kind=TransformKind.UPPER_BOUND)
LOGISTIC = Transform(kind=TransformKind.LOGISTIC)
IDENTITY = Transform(kind=TransformKind.IDENTITY)


def test_upper_bound_known_values():
    assert to_physical(UPPER, np.log(2.0)) == pytest.approx(0.5, rel=1e-15)
    assert to_physical(UPPER, 0.0) == 0.0
    assert to_transformed(UPPER, 0.5) == pytest.approx(np.log(2.0), rel=1e-15)


def test_logistic_known_values():
    assert to_physical(LOGISTIC, 0.0) == pytest.approx(0.5)
    assert to_transformed(Transform(kind=TransformKind.LOGISTIC, nu=2.0, k=3.0), 1.0) == (
        pytest.approx(0.0, abs=1e-15)
    )


@pytest.mark.parametrize("t", [UPPER, LOGISTIC, Transform(kind=TransformKind.UPPER_BOUND, nu=0.64, k=2.5)])
def test_round_trip_on_moderate_range(t):
    cbar = np.linspace(-10.0, 10.0, 201)
    back = to_transformed(t, to_physical(t, cbar))
    np.testing.assert_allclose(back, cbar, rtol=1e-12, atol=1e-12)


def test_upper_bound_stays_below_saturation_for_large_arguments():
    c = to_physical(UPPER, np.array([40.0, 1e3, 1e300]))
    assert np.all(c < 1.0)
    assert c[-1] == pytest.approx(1.0)


def test_logistic_stays_inside_open_interval():
    c = to_physical(LOGISTIC, np.array([-1e4, 0.0, 1e4]))
    assert np.all(c > 0.0)
    assert np.all(c < 1.0)


def test_identity_passes_values_through():
    values = np.array([-0.2, 0.0, 1.3])
    np.testing.assert_array_equal(to_physical(IDENTITY, values), values)
    np.testing.assert_array_equal(to_transformed(IDENTITY, values), values)


def test_upper_bound_rejects_saturated_concentration():
    with pytest.raises(DomainError):
        to_transformed(UPPER, 1.0)


@pytest.mark.parametrize("c", [0.0, 1.0])
def test_logistic_rejects_interval_ends(c):
    with pytest.raises(DomainError):
        to_transformed(LOGISTIC, c)


def test_upper_bound_source_is_scaled_rate():
    assert transformed_source(UPPER, 4.0) == 4.0
    assert transformed_source(Transform(kind=TransformKind.UPPER_BOUND, k=2.0), 4.0) == 8.0


def test_logistic_source_is_rejected_with_reaction():
    with pytest.raises(UnsupportedTransformError):
        transformed_source(LOGISTIC, 1.0)
    assert transformed_source(LOGISTIC, 0.0) == 0.0


def test_transformed_equation_matches_physical_reaction():
    # dc̄/dt = kμ ⇔ dc/dt = μ(ν − c) for c = ν(1 − exp(−c̄/k))
    t = Transform(kind=TransformKind.UPPER_BOUND, nu=0.64, k=2.0)
    mu = 3.0
    cbar = np.linspace(0.0, 5.0, 11)
    h = 1e-6
    dc_dcbar = (to_physical(t, cbar + h) - to_physical(t, cbar - h)) / (2.0 * h)
    lhs = dc_dcbar * transformed_source(t, mu)
    rhs = mu * (t.nu - to_physical(t, cbar))
    np.testing.assert_allclose(lhs, rhs, rtol=1e-7)


def test_inflow_value():
    assert inflow_value(UPPER, 0.0) == 0.0
    assert inflow_value(UPPER, 0.5) == pytest.approx(np.log(2.0))


def test_upper_bound_round_trip_below_zero():
    cbar = np.linspace(-10.0, 0.0, 101)
    c = to_physical(UPPER, cbar)
    assert np.all(c[:-1] < 0.0)
    np.testing.assert_allclose(to_transformed(UPPER, c), cbar, rtol=1e-12, atol=1e-12)
