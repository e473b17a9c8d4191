import numpy as np
import pytest

from twoshock.poincare import (MIN_FRACTION, TestProfileW, constant_lhs, sample_profiles,
                               search_violations, violation_boundary, winst_lhs, winst_lhs_batch)


def test_zero_profile():
    assert winst_lhs(TestProfileW(np.zeros(5)), 0.1) == 0.0


@pytest.mark.parametrize("c", [-2.0, -0.5, 0.3, 1.0])
@pytest.mark.parametrize("delta", [0.005, 0.1, 0.5])
def test_constant_closed_form(c, delta):
    W = TestProfileW(np.array([c, 0.0, 0.0]))
    assert winst_lhs(W, delta) == pytest.approx(constant_lhs(c, delta), rel=1e-12, abs=1e-12)


def test_sine_profile_negative():
    # project a sin(pi y) onto Legendre modes; quadrature then evaluates the expansion
    y = np.linspace(0, 1, 2001)
    coeffs = np.polynomial.legendre.legfit(2 * y - 1, np.sin(np.pi * y), 14)
    assert winst_lhs(TestProfileW(coeffs), 0.01) < 0


def test_quadrature_converges():
    c = np.random.default_rng(3).standard_normal(9) / np.arange(1, 10)
    a, b = winst_lhs_batch(c, 0.05, 120), winst_lhs_batch(c, 0.05, 1200)
    assert abs(a - b) < 1e-9 * max(1.0, abs(b))


def test_profile_object():
    W = TestProfileW(np.array([1.0, 2.0]))
    y = np.linspace(0, 1, 5)
    np.testing.assert_allclose(W(y), 1 + 2 * (2 * y - 1))
    np.testing.assert_allclose(W.deriv(y), 4.0)
    assert W.l2_squared == pytest.approx(1 + 4 / 3)


def test_samples_in_annulus():
    C = sample_profiles(500, 5.0, 6, np.random.default_rng(0))
    k = np.arange(7)
    n = np.sum(C ** 2 / (2 * k + 1), axis=1)
    assert np.all(n <= 5.0 * (1 + 1e-12)) and np.all(n >= MIN_FRACTION * 5.0 * (1 - 1e-12))


def test_small_delta_no_violations():
    r = search_violations(0.005, 5.0, 2000, seed=0, n_polish=5)
    assert r.passed and r.max_lhs < -1e-8


def test_large_delta_reports_violations():
    rows, first = violation_boundary([0.01, 0.5], C1=5.0, n_samples=500, n_polish=3)
    assert rows[0].n_violations == 0
    assert rows[1].n_violations > 0 and first == 0.5


def test_margins_decrease_as_delta_shrinks():
    W = np.array([0.4, 0.3, -0.2])
    vals = [winst_lhs_batch(W, d)[0] for d in (0.2, 0.1, 0.05, 0.01)]
    assert np.all(np.diff(vals) < 0)


def test_reproducible():
    a = search_violations(0.05, 2.5, 300, seed=7, n_polish=2)
    b = search_violations(0.05, 2.5, 300, seed=7, n_polish=2)
    assert a.max_lhs == b.max_lhs
    np.testing.assert_array_equal(a.argmax, b.argmax)


def test_bad_delta():
    with pytest.raises(ValueError):
        winst_lhs_batch(np.ones(3), 1.5)
