import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twoshock.gas import (DomainError, GasModel, bd_transform, check_inequality_suite, entropy_Q,
                          inverse_bd_transform, local_Q_lower_bound, pressure, pressure_deriv,
                          pressure_difference, pressure_inverse, relative_E, relative_entropy_eta,
                          relative_function, relative_Q, sample_global_pairs, sample_local_pairs,
                          tri_identity_residual)

vol = st.floats(0.5, 3.0)


def test_pressure_values():
    assert pressure(1.0, 1.4) == 1.0
    assert pressure(2.0, 2.0) == pytest.approx(0.25, rel=1e-15)
    with pytest.raises(DomainError):
        pressure(0.0, 2.0)
    with pytest.raises(DomainError):
        pressure(np.array([1.0, -1.0]), 2.0)


def test_pressure_inverse_values_and_roundtrip(rng):
    assert pressure_inverse(1.0, 1.4) == 1.0
    assert pressure_inverse(0.25, 2.0) == pytest.approx(2.0, rel=1e-15)
    p = rng.uniform(0.1, 10.0, 100)
    np.testing.assert_allclose(pressure(pressure_inverse(p, 1.4), 1.4), p, rtol=1e-14)


def test_entropy_values_and_derivative():
    assert entropy_Q(1.0, 2.0) == pytest.approx(1.0)
    assert entropy_Q(2.0, 2.0) == pytest.approx(0.5)
    h = 1e-4
    fd = (entropy_Q(1.3 + h, 2.0) - entropy_Q(1.3 - h, 2.0)) / (2 * h)
    assert abs(fd + pressure(1.3, 2.0)) < 1e-6


def test_gas_model_exponent_constraints():
    GasModel(2.0, 1.0)
    GasModel(1.4, 1.0)
    for g, a in ((1.0, 1.0), (3.0, 1.0), (1.4, 1.5), (2.0, 0.0)):
        with pytest.raises(DomainError):
            GasModel(g, a)
    gm = GasModel(2.0, 1.0, nu=0.5)
    assert gm.beta == 1.0
    assert gm.diffusivity == pytest.approx(0.5)
    assert gm.bd_coefficient == pytest.approx(1.0)


def test_relative_values():
    assert relative_Q(1.7, 1.7, 2.0) == 0.0
    assert relative_Q(2.0, 1.0, 2.0) == pytest.approx(0.5, rel=1e-14)
    assert relative_entropy_eta(2.0, 1.0, 1.0, 0.0, 2.0) == pytest.approx(1.0, rel=1e-14)
    assert relative_entropy_eta(1.3, 0.2, 1.3, 0.2, 2.0) == 0.0


@settings(max_examples=200, deadline=None)
@given(vol, vol, vol, st.sampled_from([1.4, 2.0]))
def test_triple_identity(u, w, v, gamma):
    for name in ("Q", "p"):
        res, scale = tri_identity_residual(name, u, w, v, gamma)
        assert abs(res) <= 1e-12 * max(scale, 1.0)


@settings(max_examples=200, deadline=None)
@given(vol, vol, st.floats(-2, 2), st.floats(-2, 2))
def test_eta_dominates_kinetic_part(v1, v2, h1, h2):
    assert relative_entropy_eta(v1, h1, v2, h2, 2.0) >= 0.5 * (h1 - h2) ** 2 - 1e-15


def test_relative_Q_small_difference_is_accurate():
    # the series branch keeps positivity where naive cancellation fails
    w = 1.0
    v = w * (1 + 1e-9)
    q = relative_Q(v, w, 1.4)
    assert q > 0
    assert q == pytest.approx(0.5 * 1.4 * (v - w) ** 2, rel=1e-6)


def test_relative_E_reduces_to_eta_for_constant_states(sw_gas):
    e = relative_E(1.5, 0.3, 0.0, 1.0, -0.1, 0.0, sw_gas)
    assert e == pytest.approx(relative_entropy_eta(1.5, 0.3, 1.0, -0.1, 2.0), rel=1e-14)
    assert relative_E(1.5, 0.3, 0.2, 1.5, 0.3, 0.2, sw_gas) == 0.0


def test_relative_E_matches_eta_after_transform(sw_gas):
    # E on smooth data vs eta of the transformed pair: O(dx^2)
    errs = []
    for n in (200, 400, 800):
        x = np.linspace(0, 2 * np.pi, n + 1)
        dx = x[1] - x[0]
        v = 1 + 0.1 * np.sin(x)
        u = 0.05 * np.cos(x)
        dpow_exact = -0.1 * np.cos(x) / v ** 2     # d/dx of p(v)^(1/2) = 1/v
        h = bd_transform(v, u, dx, sw_gas)
        e_grid = relative_E(v, u, dpow_exact, 1.0, 0.0, 0.0, sw_gas)
        eta = relative_entropy_eta(v, h, 1.0, 0.0, 2.0)
        errs.append(np.max(np.abs(e_grid - eta)[1:-1]))
    assert errs[0] / errs[1] > 3.5 and errs[1] / errs[2] > 3.5


def test_bd_transform_constant_and_sine(sw_gas):
    x = np.linspace(-5, 5, 101)
    u = np.sin(x)
    np.testing.assert_array_equal(bd_transform(np.full_like(x, 1.3), u, x[1] - x[0], sw_gas), u)
    errs = []
    for n in (200, 400):
        x = np.linspace(0, 2 * np.pi, n + 1)
        v = 1 + 0.1 * np.sin(x)
        h = bd_transform(v, np.zeros_like(x), x[1] - x[0], sw_gas)
        exact = sw_gas.bd_coefficient * (-0.1 * np.cos(x) / v ** 2)
        errs.append(np.max(np.abs(h - exact)))
    assert errs[0] / errs[1] > 3.5


def test_inverse_bd_roundtrip(sw_gas, rng):
    v = 1 + 0.2 * rng.random(50)
    u = rng.standard_normal(50)
    back = inverse_bd_transform(v, bd_transform(v, u, 0.1, sw_gas), 0.1, sw_gas)
    np.testing.assert_allclose(back, u, rtol=0, atol=1e-13)


def test_local_bound_example():
    w = 1.0
    v = pressure_inverse(pressure(w, 2.0) + 0.1, 2.0)
    z = 0.1
    rhs = 0.25 * z ** 2 - (3.0 / 12.0) * z ** 3
    assert local_Q_lower_bound(v, w, 2.0) == pytest.approx(rhs, rel=1e-12)
    assert relative_Q(v, w, 2.0) >= rhs


def test_inequality_suite_identical_pairs(sw_gas):
    rep = check_inequality_suite(np.array([[1.0, 1.0], [2.0, 2.0]]), sw_gas, 1.0)
    assert rep.local_violations == 0
    assert np.isnan(rep.c1)


def test_local_bound_sampling_has_no_violations(rng):
    s = sample_local_pairs(10_000, 1.4, 0.05, 1.0, 0.05, rng)
    assert np.all(np.abs(pressure_difference(s[:, 0], s[:, 1], 1.4)) <= 0.05 + 1e-12)
    rep = check_inequality_suite(s, GasModel(1.4, 1.0), 1.0)
    assert rep.local_violations == 0
    assert rep.local_count == 10_000


def test_global_constants_positive(sw_gas, rng):
    rep = check_inequality_suite(sample_global_pairs(5000, 1.0, rng), sw_gas, 1.0)
    assert rep.c1 > 0 and rep.c2 > 0 and rep.C_pressure > 0


def test_relative_function_unknown_name():
    with pytest.raises(ValueError):
        relative_function("x", 1.0, 1.0, 2.0)
    assert pressure_deriv(1.0, 2.0) == -2.0
