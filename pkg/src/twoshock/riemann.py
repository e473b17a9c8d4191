"""Two-shock Riemann data for the p-system and its shifted fans."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np
from scipy.integrate import trapezoid

from .gas import (DomainError, GasModel, State, pressure, pressure_deriv,
                  pressure_inverse, relative_entropy_eta)


class StructureError(RuntimeError):
    """Raised when the two discontinuities of a shifted fan have crossed."""


def _shock_speed(v_l: float, v_r: float, gamma: float, sign: float) -> float:
    if v_l == v_r:
        return sign * float(np.sqrt(-pressure_deriv(v_l, gamma)))
    slope = (pressure(v_r, gamma) - pressure(v_l, gamma)) / (v_r - v_l)
    return sign * float(np.sqrt(-slope))


@dataclass(frozen=True)
class WaveFan:
    """A 1-shock ``U_minus -> U_m`` followed by a 2-shock ``U_m -> U_plus``."""

    U_minus: State
    U_m: State
    U_plus: State
    sigma1: float
    sigma2: float
    eps1: float
    eps2: float
    gas: GasModel

    def to_json(self) -> str:
        return json.dumps(fan_to_dict(self), sort_keys=True)


def build_fan(U_minus: State, eps1: float, eps2: float, gas: GasModel) -> WaveFan:
    """Construct the fan from the left state and the two pressure jumps.

    ``p(v_m) = p(v_minus) + eps1`` and ``p(v_plus) = p(v_m) - eps2``; the
    velocities follow from the Rankine-Hugoniot conditions.  Zero strengths
    give the degenerate fan with characteristic speeds.
    """
    if eps1 < 0 or eps2 < 0 or not (np.isfinite(eps1) and np.isfinite(eps2)):
        raise DomainError("shock strengths must be finite and non-negative")
    g = gas.gamma
    v_minus, u_minus = float(U_minus[0]), float(U_minus[1])
    if v_minus <= 0:
        raise DomainError("v_minus must be positive")
    p_m = float(pressure(v_minus, g)) + eps1
    p_plus = p_m - eps2
    if p_plus <= 0:
        raise DomainError("eps2 too large: right state would have non-positive pressure")
    v_m = float(pressure_inverse(p_m, g))
    v_plus = float(pressure_inverse(p_plus, g))
    s1 = _shock_speed(v_minus, v_m, g, -1.0)
    s2 = _shock_speed(v_m, v_plus, g, +1.0)
    u_m = u_minus - s1 * (v_m - v_minus)
    u_plus = u_m - s2 * (v_plus - v_m)
    return WaveFan(State(v_minus, u_minus), State(v_m, u_m), State(v_plus, u_plus),
                   s1, s2, float(eps1), float(eps2), gas)


def rh_residuals(fan: WaveFan) -> np.ndarray:
    """Residuals of the four Rankine-Hugoniot relations (two per shock)."""
    g = fan.gas.gamma
    out = []
    for (vl, ul), (vr, ur), s in ((fan.U_minus, fan.U_m, fan.sigma1),
                                  (fan.U_m, fan.U_plus, fan.sigma2)):
        out.append(-s * (vr - vl) - (ur - ul))
        out.append(-s * (ur - ul) + (pressure(vr, g) - pressure(vl, g)))
    return np.array(out, dtype=float)


def lax_holds(fan: WaveFan) -> bool:
    """Entropy (Lax) orderings of both shocks and ``sigma1 < 0 < sigma2``."""
    a, m, b = fan.U_minus, fan.U_m, fan.U_plus
    if fan.eps1 == 0 and fan.eps2 == 0:
        return fan.sigma1 < 0 < fan.sigma2
    ok1 = fan.eps1 == 0 or (a.v > m.v and a.u > m.u)
    ok2 = fan.eps2 == 0 or (m.v < b.v and m.u > b.u)
    return bool(ok1 and ok2 and fan.sigma1 < 0 < fan.sigma2)


def shock_positions(fan: WaveFan, t: float, X1: float = 0.0, X2: float = 0.0) -> Tuple[float, float]:
    return fan.sigma1 * t + X1, fan.sigma2 * t + X2


def eval_fan(fan: WaveFan, t: float, x, X1: float = 0.0, X2: float = 0.0):
    """Shifted fan at time ``t``; returns ``(v, u)`` arrays shaped like ``x``.

    A point exactly on a discontinuity takes the value on its left.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    s1, s2 = shock_positions(fan, t, X1, X2)
    if s1 > s2:
        raise StructureError(f"shifted shocks crossed: {s1:.6g} > {s2:.6g}")
    x = np.asarray(x, dtype=float)
    left, right = x <= s1, x > s2
    v = np.where(left, fan.U_minus.v, np.where(right, fan.U_plus.v, fan.U_m.v))
    u = np.where(left, fan.U_minus.u, np.where(right, fan.U_plus.u, fan.U_m.u))
    return v, u


class FanDistance(NamedTuple):
    l1_v: float
    l2_h: float
    entropy: float


def fan_distance(x, v, h, fan: WaveFan, t: float, X1: float = 0.0, X2: float = 0.0) -> FanDistance:
    """Trapezoidal ``L1`` distance of ``v``, ``L2`` distance of ``h`` and
    integrated relative entropy between grid data and the shifted fan."""
    vb, ub = eval_fan(fan, t, x, X1, X2)
    l1 = trapezoid(np.abs(v - vb), x)
    l2 = np.sqrt(trapezoid((h - ub) ** 2, x))
    eta = trapezoid(relative_entropy_eta(v, h, vb, ub, fan.gas.gamma), x)
    return FanDistance(float(l1), float(l2), float(eta))


_FAN_KEYS = ("v_minus", "u_minus", "eps1", "eps2", "gamma", "alpha")


def fan_to_dict(fan: WaveFan) -> dict:
    return {"v_minus": fan.U_minus.v, "u_minus": fan.U_minus.u, "eps1": fan.eps1,
            "eps2": fan.eps2, "gamma": fan.gas.gamma, "alpha": fan.gas.alpha}


def fan_from_dict(d: dict, b=None, nu: float = 1.0) -> WaveFan:
    """Rebuild a fan from its defining parameters; derived values are recomputed."""
    missing = [k for k in _FAN_KEYS if k not in d]
    if missing:
        raise ValueError(f"fan document missing fields: {missing}")
    gas = GasModel(float(d["gamma"]), float(d["alpha"]), b=b, nu=nu)
    return build_fan(State(float(d["v_minus"]), float(d["u_minus"])),
                     float(d["eps1"]), float(d["eps2"]), gas)


def fan_from_json(text: str, **kw) -> WaveFan:
    return fan_from_dict(json.loads(text), **kw)
