"""Viscous shock profiles of the (v, h) system and their superposition.

A profile of speed ``sigma`` joining ``(v_l, h_l)`` to ``(v_r, h_r)`` solves
the once-integrated traveling-wave equations

    d v**beta p'(v) v' = sigma (v - v_l) + (p(v) - p(v_l)) / sigma,
    h = h_l + (p(v) - p(v_l)) / sigma,

with ``d = gas.diffusivity``.  The scalar equation ``v' = F(v)`` is integrated
outward from the midpoint ``v(0) = (v_l + v_r) / 2`` with classical RK4.
Values between samples use cubic Hermite interpolation with the exact slopes
``F(v)``; derivatives are then recovered in closed form from ``v``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .gas import (GasModel, State, pressure, pressure_deriv, pressure_difference,
                  pressure_second)
from .riemann import WaveFan


class ProfileError(RuntimeError):
    """Profile integration failed (non-monotone samples or end state not reached)."""


_TAIL_TOL = 1e-10     # stop integrating once |v - v_end| < _TAIL_TOL * eps
_END_TOL = 1e-8       # required closeness at the grid ends


@dataclass(frozen=True)
class ProfileDerivs:
    """Profile values and ``xi``-derivatives at a set of points."""

    v: np.ndarray
    h: np.ndarray
    u: np.ndarray
    v_x: np.ndarray
    v_xx: np.ndarray
    h_x: np.ndarray
    flux_x: np.ndarray   # (v**beta p(v)_x)_x
    p_x: np.ndarray      # p(v)_x


@dataclass(frozen=True)
class ShockProfile:
    family: int
    left: State
    right: State
    sigma: float
    eps: float
    gas: GasModel
    xi: np.ndarray
    v: np.ndarray
    h: np.ndarray
    u: np.ndarray
    decay_rate: float = 0.0
    _spline: Optional[CubicHermiteSpline] = field(default=None, repr=False, compare=False)

    @property
    def dxi(self) -> float:
        return float(self.xi[1] - self.xi[0]) if self.xi.size > 1 else 0.0

    # -- closed-form right-hand side -----------------------------------
    def _numerator(self, v):
        """``sigma (v - v_e) + (p(v) - p(v_e)) / sigma`` relative to the nearer end state."""
        g = self.gas.gamma
        vl, vr, s = self.left.v, self.right.v, self.sigma
        near_r = np.abs(v - vr) < np.abs(v - vl)
        ve = np.where(near_r, vr, vl)
        return s * (v - ve) + pressure_difference(v, ve, g) / s

    def slope(self, v):
        """``F(v)`` with ``v' = F(v)``."""
        v = np.asarray(v, dtype=float)
        if self.eps == 0:
            return np.zeros_like(v)
        d, g, b = self.gas.diffusivity, self.gas.gamma, self.gas.beta
        return self._numerator(v) / (d * v ** b * pressure_deriv(v, g))

    def slope_deriv(self, v):
        """``F'(v)``."""
        v = np.asarray(v, dtype=float)
        if self.eps == 0:
            return np.zeros_like(v)
        d, g, b = self.gas.diffusivity, self.gas.gamma, self.gas.beta
        s = self.sigma
        num = self._numerator(v)
        dnum = s + pressure_deriv(v, g) / s
        den = d * v ** b * pressure_deriv(v, g)
        dden = d * (b * v ** (b - 1.0) * pressure_deriv(v, g) + v ** b * pressure_second(v, g))
        return (dnum * den - num * dden) / den ** 2

    # -- evaluation ----------------------------------------------------
    def values(self, xi):
        """Profile ``v`` at arbitrary ``xi`` (exponential tails beyond the grid)."""
        xi = np.asarray(xi, dtype=float)
        if self.eps == 0 or self.xi.size < 2:
            return np.full_like(xi, self.left.v)
        lo, hi = self.xi[0], self.xi[-1]
        inside = np.clip(xi, lo, hi)
        v = self._spline(inside)
        # linearized tails toward the end states
        vl, vr = self.left.v, self.right.v
        rl = float(self.slope_deriv(vl))
        rr = float(self.slope_deriv(vr))
        left = xi < lo
        right = xi > hi
        if np.any(left):
            v = np.where(left, vl + (self.v[0] - vl) * np.exp(rl * (xi - lo)), v)
        if np.any(right):
            v = np.where(right, vr + (self.v[-1] - vr) * np.exp(rr * (xi - hi)), v)
        return v

    def evaluate(self, xi) -> ProfileDerivs:
        """Values and derivatives at ``xi``."""
        g, gas = self.gas.gamma, self.gas
        v = self.values(xi)
        vx = self.slope(v)
        vxx = self.slope_deriv(v) * vx
        dp = pressure_deriv(v, g)
        px = dp * vx
        hx = px / self.sigma
        h = self.left.u + pressure_difference(v, self.left.v, g) / self.sigma
        h = np.where(np.abs(v - self.right.v) < np.abs(v - self.left.v),
                     self.right.u + pressure_difference(v, self.right.v, g) / self.sigma, h)
        if self.eps == 0:
            flux_x = np.zeros_like(v)
        else:
            flux_x = (self.sigma + dp / self.sigma) * vx / gas.diffusivity
        r = gas.alpha / gas.gamma
        u = h - gas.bd_coefficient * r * pressure(v, g) ** (r - 1.0) * px
        return ProfileDerivs(v, h, u, vx, vxx, hx, flux_x, px)

    def to_csv(self, path) -> None:
        from .io import atomic_write_csv
        atomic_write_csv(path, ["xi", "v", "h", "u"], np.column_stack([self.xi, self.v, self.h, self.u]))


def _scalar_slope(vl: float, vr: float, sigma: float, gas: GasModel):
    """Fast scalar version of :meth:`ShockProfile.slope` for the integrator."""
    g, b, d = gas.gamma, gas.beta, gas.diffusivity

    def f(v):
        ve = vr if abs(v - vr) < abs(v - vl) else vl
        dp = ve ** -g * math.expm1(-g * math.log1p((v - ve) / ve))
        return (sigma * (v - ve) + dp / sigma) / (-d * g * v ** (b - g - 1.0))
    return f


def _rk4(f, y0: float, step: float, stop, max_steps: int):
    ys = [y0]
    y = y0
    for _ in range(max_steps):
        k1 = f(y)
        k2 = f(y + 0.5 * step * k1)
        k3 = f(y + 0.5 * step * k2)
        k4 = f(y + step * k3)
        y = y + step * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        ys.append(y)
        if stop(y):
            break
    return np.array(ys)


def solve_profile(family: int, fan: WaveFan, xi_half_width: Optional[float] = None,
                  dxi: Optional[float] = None) -> ShockProfile:
    """Viscous profile of one shock of ``fan``.

    Parameters
    ----------
    family : {1, 2}
    fan : WaveFan
        Supplies end states, speed, strength and gas model.
    xi_half_width : float, optional
        Cap on the half-width of the sample grid; default ``60 d / eps``.
        Integration stops earlier once the end state is reached to
        ``1e-10 eps``.
    dxi : float, optional
        Grid step; default ``0.01 d / eps``.  Must not exceed ``0.1 d / eps``.
    """
    if family not in (1, 2):
        raise ValueError("family must be 1 or 2")
    gas = fan.gas
    if gas.nu <= 0:
        raise ValueError("profiles need nu > 0")
    left, right = (fan.U_minus, fan.U_m) if family == 1 else (fan.U_m, fan.U_plus)
    sigma = fan.sigma1 if family == 1 else fan.sigma2
    eps = fan.eps1 if family == 1 else fan.eps2
    d = gas.diffusivity
    if eps == 0:
        z = np.zeros(1)
        return ShockProfile(family, left, right, sigma, 0.0, gas, z, np.full(1, left.v),
                            np.full(1, left.u), np.full(1, left.u))
    if dxi is None:
        dxi = 0.01 * d / eps
    if dxi <= 0 or dxi > 0.1 * d / eps:
        raise ProfileError(f"dxi={dxi:.3g} does not resolve the layer (need <= {0.1 * d / eps:.3g})")
    if xi_half_width is None:
        xi_half_width = 60.0 * d / eps
    n_max = int(np.ceil(xi_half_width / dxi))

    proto = ShockProfile(family, left, right, sigma, eps, gas, np.zeros(0), np.zeros(0),
                         np.zeros(0), np.zeros(0))
    f = _scalar_slope(left.v, right.v, sigma, gas)
    v0 = 0.5 * (left.v + right.v)
    tol = _TAIL_TOL * eps
    fwd = _rk4(f, v0, dxi, lambda y: abs(y - right.v) < tol, n_max)
    bwd = _rk4(f, v0, -dxi, lambda y: abs(y - left.v) < tol, n_max)
    if abs(fwd[-1] - right.v) > _END_TOL * eps or abs(bwd[-1] - left.v) > _END_TOL * eps:
        raise ProfileError("end states not reached within xi_half_width; enlarge it")
    v = np.concatenate([bwd[::-1], fwd[1:]])
    xi = dxi * np.arange(-(bwd.size - 1), fwd.size)
    dv = np.diff(v)
    mono = dv < 0 if family == 1 else dv > 0
    if not np.all(mono):
        raise ProfileError("profile samples are not strictly monotone; reduce dxi")
    spline = CubicHermiteSpline(xi, v, proto.slope(v))
    tmp = ShockProfile(family, left, right, sigma, eps, gas, xi, v, v, v, 0.0, spline)
    ev = tmp.evaluate(xi)
    prof = ShockProfile(family, left, right, sigma, eps, gas, xi, v, ev.h, ev.u, 0.0, spline)
    object.__setattr__(prof, "decay_rate", tail_decay_rate(prof))
    return prof


def profile_residual(prof: ShockProfile) -> float:
    """Max-norm residual of the non-integrated traveling-wave system on the samples.

    ``-sigma v' - h' + d (v**beta p(v)')' = 0`` and ``-sigma h' + p(v)' = 0``
    with second-order centered differences.
    """
    if prof.eps == 0 or prof.xi.size < 3:
        return 0.0
    g, gas = prof.gas.gamma, prof.gas
    dx = prof.dxi
    v, h = prof.v, prof.h
    p = pressure(v, g)
    dv = (v[2:] - v[:-2]) / (2 * dx)
    dh = (h[2:] - h[:-2]) / (2 * dx)
    dpc = (p[2:] - p[:-2]) / (2 * dx)
    vb = v ** gas.beta
    face = 0.5 * (vb[1:] + vb[:-1]) * np.diff(p) / dx
    flux = np.diff(face) / dx
    r1 = -prof.sigma * dv - dh + gas.diffusivity * flux
    r2 = -prof.sigma * dh + dpc
    return float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))


def tail_decay_rate(prof: ShockProfile, window=(5.0, 10.0)) -> float:
    """Exponential rate of ``|v - v_m|`` fitted on ``|xi|`` in ``window * d / eps``.

    The tail toward the middle state is used: ``xi > 0`` for the 1-shock and
    ``xi < 0`` for the 2-shock.
    """
    if prof.eps == 0:
        return 0.0
    d = prof.gas.diffusivity
    lo, hi = window[0] * d / prof.eps, window[1] * d / prof.eps
    if prof.family == 1:
        xi = np.linspace(lo, hi, 200)
        dist = np.abs(prof.values(xi) - prof.right.v)
    else:
        xi = np.linspace(-hi, -lo, 200)
        dist = np.abs(prof.values(xi) - prof.left.v)
    slope = np.polyfit(np.abs(xi), np.log(dist), 1)[0]
    return float(-slope)


@dataclass(frozen=True)
class CompositeSample:
    """Composite wave and its two constituents sampled on a grid."""

    v: np.ndarray
    h: np.ndarray
    u: np.ndarray
    w1: ProfileDerivs
    w2: ProfileDerivs

    @property
    def v_x(self):
        return self.w1.v_x + self.w2.v_x

    @property
    def h_x(self):
        return self.w1.h_x + self.w2.h_x


@dataclass(frozen=True)
class CompositeWave:
    """Superposition ``U1(x - sigma1 t - X1) + U2(x - sigma2 t - X2) - U_m``."""

    profile1: ShockProfile
    profile2: ShockProfile
    U_m: State

    def sample(self, t: float, x, X1: float = 0.0, X2: float = 0.0) -> CompositeSample:
        x = np.asarray(x, dtype=float)
        w1 = self.profile1.evaluate(x - self.profile1.sigma * t - X1)
        w2 = self.profile2.evaluate(x - self.profile2.sigma * t - X2)
        vm, um = self.U_m
        return CompositeSample(w1.v + w2.v - vm, w1.h + w2.h - um, w1.u + w2.u - um, w1, w2)


def build_composite(fan: WaveFan, xi_half_width=None, dxi=None) -> CompositeWave:
    return CompositeWave(solve_profile(1, fan, xi_half_width, dxi),
                         solve_profile(2, fan, xi_half_width, dxi), fan.U_m)


def eval_composite(w: CompositeWave, t: float, x, X1: float = 0.0, X2: float = 0.0):
    """Composite wave at ``(t, x)``; returns ``(v, h, u)``."""
    s = w.sample(t, x, X1, X2)
    return s.v, s.h, s.u
