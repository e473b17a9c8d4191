import numpy as np
import pytest

from twoshock.gas import State
from twoshock.profiles import (ProfileError, eval_composite, profile_residual,
                               solve_profile, tail_decay_rate)
from twoshock.riemann import build_fan


@pytest.fixture(scope="module")
def profiles(sw_fan):
    return solve_profile(1, sw_fan), solve_profile(2, sw_fan)


def test_monotone_and_normalized(profiles, sw_fan):
    p1, p2 = profiles
    assert np.all(np.diff(p1.v) < 0)
    assert np.all(np.diff(p2.v) > 0)
    assert p1.values(0.0) == pytest.approx(0.5 * (sw_fan.U_minus.v + sw_fan.U_m.v), abs=1e-14)
    assert p2.values(0.0) == pytest.approx(0.5 * (sw_fan.U_m.v + sw_fan.U_plus.v), abs=1e-14)


def test_end_states_reached(profiles):
    for p in profiles:
        assert abs(p.v[0] - p.left.v) < 1e-8 * p.eps
        assert abs(p.v[-1] - p.right.v) < 1e-8 * p.eps


def test_residual_small(profiles):
    for p in profiles:
        assert profile_residual(p) < 1e-6


def test_residual_second_order(sw_fan):
    r = [profile_residual(solve_profile(1, sw_fan, dxi=h)) for h in (0.4, 0.2)]
    assert np.log2(r[0] / r[1]) > 1.9


def test_degenerate_profile(sw_gas):
    fan = build_fan(State(1.0, 0.0), 0.0, 0.1, sw_gas)
    p = solve_profile(1, fan)
    assert profile_residual(p) == 0.0
    np.testing.assert_array_equal(p.values(np.array([-5.0, 0.0, 5.0])), 1.0)


def test_coarse_step_rejected(sw_fan):
    with pytest.raises(ProfileError):
        solve_profile(1, sw_fan, dxi=5.0)
    with pytest.raises(ValueError):
        solve_profile(3, sw_fan)


def test_decay_rate_linear_in_strength(sw_gas):
    ratios = []
    for e in (0.05, 0.1, 0.2):
        p = solve_profile(1, build_fan(State(1.0, 0.0), e, e, sw_gas))
        ratios.append(tail_decay_rate(p) / e)
    assert max(ratios) / min(ratios) < 2.0


def test_derivatives_consistent(profiles):
    p = profiles[0]
    xi = np.linspace(-30, 30, 301)
    ev = p.evaluate(xi)
    h = 1e-4
    fd = (p.values(xi + h) - p.values(xi - h)) / (2 * h)
    np.testing.assert_allclose(ev.v_x, fd, atol=1e-8)
    fd2 = (p.evaluate(xi + h).v_x - p.evaluate(xi - h).v_x) / (2 * h)
    np.testing.assert_allclose(ev.v_xx, fd2, atol=1e-8)


def test_tails_continuous(profiles):
    p = profiles[0]
    lo, hi = p.xi[0], p.xi[-1]
    for edge in (lo, hi):
        assert abs(p.values(edge - 1e-9) - p.values(edge + 1e-9)) < 1e-12


def test_composite_end_states_and_superposition(sw_wave, sw_fan):
    v, h, u = eval_composite(sw_wave, 0.0, np.array([-1e4, 1e4]))
    assert v[0] == pytest.approx(sw_fan.U_minus.v, abs=1e-12)
    assert v[1] == pytest.approx(sw_fan.U_plus.v, abs=1e-12)
    assert h[0] == pytest.approx(sw_fan.U_minus.u, abs=1e-12)
    x = np.linspace(-50, 50, 11)
    s = sw_wave.sample(2.0, x, 0.3, -0.2)
    w1 = sw_wave.profile1.values(x - sw_fan.sigma1 * 2.0 - 0.3)
    w2 = sw_wave.profile2.values(x - sw_fan.sigma2 * 2.0 + 0.2)
    np.testing.assert_allclose(s.v, w1 + w2 - sw_fan.U_m.v, rtol=0, atol=1e-15)


def test_composite_middle_approaches_um(sw_wave, sw_fan):
    gaps = [abs(eval_composite(sw_wave, t, 0.0)[0] - sw_fan.U_m.v) for t in (50.0, 100.0, 200.0)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-3 * sw_fan.eps1


def test_to_csv(tmp_path, profiles):
    profiles[0].to_csv(tmp_path / "p.csv")
    data = np.loadtxt(tmp_path / "p.csv", delimiter=",", skiprows=1)
    assert data.shape == (profiles[0].xi.size, 4)
