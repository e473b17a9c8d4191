"""Weight functions, the rate functions Phi/Psi and the shift ODE."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence, Tuple

import numpy as np

from .gas import pressure_deriv, pressure_difference
from .profiles import CompositeSample, CompositeWave
from .riemann import WaveFan


class ShiftInvariantError(RuntimeError):
    """The shift update broke the separation bounds (indicates a bug in the rate)."""


class Weights(NamedTuple):
    a1: np.ndarray
    a2: np.ndarray
    a: np.ndarray
    da1: np.ndarray
    da2: np.ndarray

    @property
    def da(self):
        return self.da1 + self.da2


@dataclass(frozen=True)
class WeightPair:
    """Weights ``a_i = 1 - lam (p(v_i) - p(v_ref_i)) / eps_i`` built on the two profiles.

    ``v_ref_1 = v_minus`` and ``v_ref_2 = v_plus``, so ``a_1`` falls from 1 to
    ``1 - lam`` and ``a_2`` rises from ``1 - lam`` to 1.
    """

    lam: float
    wave: CompositeWave
    fan: WaveFan

    def __post_init__(self):
        if not (0.0 < self.lam < 1.0):
            raise ValueError("lambda must lie in (0, 1)")

    def from_sample(self, s: CompositeSample) -> Weights:
        g = self.fan.gas.gamma
        lam, e1, e2 = self.lam, self.fan.eps1, self.fan.eps2
        vm, vp = self.fan.U_minus.v, self.fan.U_plus.v
        if e1 > 0:
            a1 = 1.0 - lam * pressure_difference(s.w1.v, vm, g) / e1
            da1 = -lam / e1 * pressure_deriv(s.w1.v, g) * s.w1.v_x
        else:
            a1, da1 = np.ones_like(s.v), np.zeros_like(s.v)
        if e2 > 0:
            a2 = 1.0 - lam * pressure_difference(s.w2.v, vp, g) / e2
            da2 = -lam / e2 * pressure_deriv(s.w2.v, g) * s.w2.v_x
        else:
            a2, da2 = np.ones_like(s.v), np.zeros_like(s.v)
        return Weights(a1, a2, a1 + a2 - 1.0, da1, da2)


def weight_eval(wp: WeightPair, t: float, x, X1: float = 0.0, X2: float = 0.0) -> Weights:
    """``(a1, a2, a, da1, da2)`` of the shifted weights at ``(t, x)``."""
    return wp.from_sample(wp.wave.sample(t, x, X1, X2))


def phi_eps(y, eps: float):
    """0 for ``y <= 0``, ``-y / eps**4`` on ``[0, eps**2]``, ``-1 / eps**2`` beyond."""
    y = np.asarray(y, dtype=float)
    return -np.clip(y, 0.0, eps ** 2) / eps ** 4


def psi_eps(y, eps: float):
    """1 for ``y <= -eps**2``, ``-y / eps**2`` on ``[-eps**2, 0]``, 0 beyond."""
    y = np.asarray(y, dtype=float)
    return -np.clip(y, -eps ** 2, 0.0) / eps ** 2


def shift_rhs(Y1: float, Y2: float, Jbad: float, fan: WaveFan) -> Tuple[float, float]:
    """Shift velocities ``(dX1/dt, dX2/dt)``.

    ``dX1 = Phi(Y1)(2|J|+1) - sigma1/2 Psi(Y1)`` and
    ``dX2 = -Phi(-Y2)(2|J|+1) - sigma2/2 Psi(-Y2)``.
    """
    e1, e2 = fan.eps1, fan.eps2
    if e1 <= 0 or e2 <= 0:
        raise ValueError("shift rates need positive strengths")
    amp = 2.0 * abs(Jbad) + 1.0
    d1 = phi_eps(Y1, e1) * amp - 0.5 * fan.sigma1 * psi_eps(Y1, e1)
    d2 = -phi_eps(-Y2, e2) * amp - 0.5 * fan.sigma2 * psi_eps(-Y2, e2)
    return float(d1), float(d2)


def shift_branch(Y: float, eps: float, family: int) -> int:
    """Index of the active piece: 0 saturated drift, 1 linear drift, 2 linear push, 3 saturated push.

    Pieces are ordered by ``(-1)**(family-1) Y``: ``<= -eps**2``, ``[-eps**2, 0)``,
    ``[0, eps**2)``, ``>= eps**2``.
    """
    z = Y if family == 1 else -Y
    e2 = eps ** 2
    if z <= -e2:
        return 0
    if z < 0:
        return 1
    if z < e2:
        return 2
    return 3


def shift_rhs_explicit(Y1: float, Y2: float, Jbad: float, fan: WaveFan) -> Tuple[float, float]:
    """Piecewise form of :func:`shift_rhs`, written out branch by branch."""
    amp = 2.0 * abs(Jbad) + 1.0
    out = []
    for i, (Y, eps, sig) in enumerate(((Y1, fan.eps1, fan.sigma1), (Y2, fan.eps2, fan.sigma2)), start=1):
        sgn = 1.0 if i == 1 else -1.0
        z = sgn * Y
        e2 = eps ** 2
        if z >= e2:
            r = -sgn * amp / e2
        elif z >= 0:
            r = -sgn * amp * z / eps ** 4
        elif z >= -e2:
            r = sig * z / (2.0 * e2)
        else:
            r = -0.5 * sig
        out.append(float(r))
    return out[0], out[1]


@dataclass(frozen=True)
class ShiftState:
    X1: float = 0.0
    X2: float = 0.0
    t: float = 0.0


def advance_shifts(s: ShiftState, rates: Sequence[Tuple[float, float]], dt: float,
                   fan: WaveFan, weights: Sequence[float] = None) -> ShiftState:
    """One explicit step ``X += dt * sum_k w_k rate_k``.

    ``rates`` are the shift velocities at the stepper's stages and ``weights``
    their quadrature weights (equal weights by default, which is Heun's rule
    for two stages).  Since every rate satisfies the one-sided bounds, so does
    the update; excess at rounding level is clamped, anything larger raises.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    r = np.asarray(rates, dtype=float).reshape(-1, 2)
    w = np.full(r.shape[0], 1.0 / r.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    d1, d2 = w @ r
    t = s.t + dt
    X1, X2 = s.X1 + dt * d1, s.X2 + dt * d2
    b1, b2 = -0.5 * fan.sigma1 * t, -0.5 * fan.sigma2 * t
    tol = 64 * np.finfo(float).eps * (1.0 + abs(b1) + abs(X1) + abs(b2) + abs(X2))
    if X1 > b1 + tol or X2 < b2 - tol:
        raise ShiftInvariantError(f"shift bounds violated at t={t:.6g}: X1={X1:.6g}, X2={X2:.6g}")
    return ShiftState(min(X1, b1), max(X2, b2), t)
