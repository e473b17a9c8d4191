import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twoshock.gas import DomainError, GasModel, State, pressure_deriv
from twoshock.riemann import (StructureError, build_fan, eval_fan, fan_distance, fan_from_json,
                              lax_holds, rh_residuals, shock_positions)


def test_shallow_water_fan(sw_fan):
    assert np.max(np.abs(rh_residuals(sw_fan))) < 1e-12
    assert lax_holds(sw_fan)
    assert sw_fan.sigma1 < 0 < sw_fan.sigma2


def test_degenerate_fan(sw_gas):
    fan = build_fan(State(1.0, 0.0), 0.0, 0.0, sw_gas)
    assert fan.U_minus == fan.U_m == fan.U_plus
    c = np.sqrt(-pressure_deriv(1.0, 2.0))
    assert fan.sigma1 == pytest.approx(-c)
    assert fan.sigma2 == pytest.approx(c)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.8, 1.2), st.floats(-0.5, 0.5), st.floats(1e-4, 0.2), st.floats(1e-4, 0.2),
       st.sampled_from([(1.4, 1.0), (2.0, 1.0), (3.0, 2.0)]))
def test_random_fans_satisfy_rh_and_lax(v, u, e1, e2, ga):
    fan = build_fan(State(v, u), e1, e2, GasModel(*ga))
    assert np.max(np.abs(rh_residuals(fan))) < 1e-10
    assert lax_holds(fan)


def test_invalid_strengths(sw_gas):
    with pytest.raises(DomainError):
        build_fan(State(1.0, 0.0), -0.1, 0.1, sw_gas)
    with pytest.raises(DomainError):
        build_fan(State(1.0, 0.0), 0.1, 5.0, sw_gas)


def test_eval_fan_initial_and_middle(sw_fan):
    x = np.array([-1.0, -1e-9, 1e-9, 1.0])
    v, u = eval_fan(sw_fan, 0.0, x)
    np.testing.assert_array_equal(v, [sw_fan.U_minus.v] * 2 + [sw_fan.U_plus.v] * 2)
    v, u = eval_fan(sw_fan, 1.0, 0.0)
    assert v == sw_fan.U_m.v and u == sw_fan.U_m.u


def test_eval_fan_extremal_shifts(sw_fan):
    s1, s2 = sw_fan.sigma1, sw_fan.sigma2
    a, b = shock_positions(sw_fan, 1.0, -s1 / 2, -s2 / 2)
    assert a == pytest.approx(s1 / 2) and b == pytest.approx(s2 / 2)
    v, _ = eval_fan(sw_fan, 1.0, np.array([s1 / 2 - 1e-6, 0.0, s2 / 2 + 1e-6]), -s1 / 2, -s2 / 2)
    np.testing.assert_array_equal(v, [sw_fan.U_minus.v, sw_fan.U_m.v, sw_fan.U_plus.v])


def test_eval_fan_crossed_shocks(sw_fan):
    with pytest.raises(StructureError):
        eval_fan(sw_fan, 1.0, 0.0, X1=5.0, X2=-5.0)


def test_fan_distance_zero_for_fan_data(sw_fan):
    x = np.linspace(-10, 10, 2001)
    v, u = eval_fan(sw_fan, 1.0, x)
    d = fan_distance(x, v, u, sw_fan, 1.0)
    assert d.l1_v == 0.0 and d.l2_h == 0.0 and d.entropy == 0.0


def test_fan_distance_bump(sw_fan):
    # Gaussian bump of height 0.1, width 1 inside the middle region at t=10
    t = 10.0
    x = np.linspace(-40, 40, 16001)
    v, u = eval_fan(sw_fan, t, x)
    bump = 0.1 * np.exp(-0.5 * x ** 2)
    d = fan_distance(x, v + bump, u, sw_fan, t)
    assert d.l1_v == pytest.approx(0.1 * np.sqrt(2 * np.pi), rel=1e-8)


def test_fan_distance_refinement(sw_fan):
    vals = []
    for n in (1000, 2000, 4000):
        x = np.linspace(-10, 10, n + 1)
        v, u = eval_fan(sw_fan, 1.0, x)
        vals.append(fan_distance(x, v + 0.05 * np.exp(-x ** 2), u, sw_fan, 1.0, 0.3, -0.3).l1_v)
    assert abs(vals[1] - vals[2]) <= abs(vals[0] - vals[1]) + 1e-12
    assert abs(vals[2] - vals[1]) < 2 * 20 / 2000


def test_json_roundtrip(sw_fan):
    text = sw_fan.to_json()
    assert set(json.loads(text)) == {"v_minus", "u_minus", "eps1", "eps2", "gamma", "alpha"}
    back = fan_from_json(text)
    assert back.U_m == sw_fan.U_m and back.sigma2 == sw_fan.sigma2
    with pytest.raises(ValueError):
        fan_from_json('{"v_minus": 1.0}')
