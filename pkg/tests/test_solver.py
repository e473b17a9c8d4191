import numpy as np
import pytest
from scipy.integrate import trapezoid

from twoshock.gas import bd_transform, relative_entropy_eta
from twoshock.profiles import solve_profile
from twoshock.solver import (BlowUpError, Field, Grid, evolve, perturbation, raw_step, raw_to_bd,
                             stable_dt, step)


def test_constant_state_fixed_point(sw_gas):
    g = Grid(-10, 10, 200)
    f = Field(g, np.full(201, 1.2), np.full(201, -0.3))
    out = step(f, 0.01, sw_gas)
    np.testing.assert_array_equal(out.v, f.v)
    np.testing.assert_array_equal(out.h, f.h)
    out = raw_step(f, 0.01, sw_gas)
    np.testing.assert_array_equal(out.v, f.v)


def test_evolve_zero_time_is_identity(sw_gas):
    g = Grid(-10, 10, 100)
    f = Field(g, 1 + 0.1 * np.exp(-g.x ** 2), np.zeros(101))
    assert evolve(f, 0.0, sw_gas) is f


def test_entropy_decreases_for_sine(sw_gas):
    g = Grid(0, 2 * np.pi * 4, 400)
    dv, dh = perturbation(g.x, [{"kind": "sine", "field": "v", "amplitude": 0.05, "center": 0.0,
                                 "width": 2 * np.pi}])
    f = Field(g, 1 + dv, dh)
    ent = []
    evolve(f, 2.0, sw_gas, callback=lambda fl: ent.append(
        trapezoid(relative_entropy_eta(fl.v, fl.h, 1.0, 0.0, 2.0), g.x)))
    assert ent[-1] < ent[0]
    assert np.all(np.diff(ent) < 1e-8)


def test_blow_up_detected(sw_gas):
    g = Grid(-10, 10, 100)
    f = Field(g, 1 + 0.1 * np.exp(-g.x ** 2), np.zeros(101))
    with pytest.raises(BlowUpError):
        evolve(f, 50.0, sw_gas, dt=5.0)


def test_stable_dt_limits(sw_gas):
    g = Grid(-10, 10, 100)
    f = Field(g, np.full(101, 1.0), np.zeros(101))
    dt = stable_dt(f, sw_gas)
    assert dt == pytest.approx(min(0.4 * 0.2 / np.sqrt(2.0), 0.25 * 0.04 / 2.0))


def test_perturbation_spec():
    x = np.linspace(-5, 5, 11)
    dv, dh = perturbation(x, [{"kind": "gaussian", "field": "h", "amplitude": 2.0, "center": 1.0,
                               "width": 1.0}])
    assert np.all(dv == 0) and dh[6] == 2.0
    with pytest.raises(ValueError):
        perturbation(x, [{"kind": "box", "amplitude": 1, "width": 1}])
    with pytest.raises(ValueError):
        perturbation(x, [{"amplitude": 1, "width": 0}])


def _travel_error(n, gas, fan, prof, T, L=300.0):
    g = Grid(-L, L, n)
    ev = prof.evaluate(g.x)
    f = Field(g, ev.v, ev.h)
    f = evolve(f, T, gas)
    ex = prof.evaluate(g.x - prof.sigma * T)
    return np.sqrt(trapezoid((f.v - ex.v) ** 2 + (f.h - ex.h) ** 2, g.x))


def test_traveling_wave_convergence(sw_gas, sw_fan):
    prof = solve_profile(1, sw_fan)
    T = 1.0 / abs(prof.sigma)
    e1 = _travel_error(1000, sw_gas, sw_fan, prof, T)
    e2 = _travel_error(2000, sw_gas, sw_fan, prof, T)
    assert 3.4 <= e1 / e2 <= 4.6


def test_raw_and_bd_agree(sw_gas):
    g = Grid(-20, 20, 400)
    v0 = 1 + 0.1 * np.exp(-g.x ** 2 / 4)
    u0 = 0.05 * np.exp(-(g.x - 1) ** 2 / 4)
    raw = Field(g, v0, u0)
    bd = raw_to_bd(raw, sw_gas)
    dt = 0.5 * stable_dt(raw, sw_gas, raw=True)
    raw = evolve(raw, 0.5, sw_gas, dt=dt, raw=True)
    bd = evolve(bd, 0.5, sw_gas, dt=dt)
    h_raw = bd_transform(raw.v, raw.h, g.dx, sw_gas)
    assert np.max(np.abs(raw.v - bd.v)) < 1e-3
    assert np.max(np.abs(h_raw - bd.h)) < 1e-3
