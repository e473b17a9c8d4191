"""Explicit finite-difference solver for the (v, h) system and the raw (v, u) system.

(v, h) system::

    v_t - h_x = -d (v**beta p(v)_x)_x,    h_t + p(v)_x = 0.

Raw system::

    v_t - u_x = 0,    u_t + p(v)_x = nu (b v**(-alpha-1) u_x)_x.

Nodes ``x_j = x_min + j dx``, ``j = 0..n``; the two end nodes are pinned to
their initial values (far-field Dirichlet data).  Centered differences for
first derivatives, conservative face fluxes for diffusion, Heun's two-stage
time stepping.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, List, Optional

import numpy as np

from .gas import GasModel, bd_transform, inverse_bd_transform, pressure, pressure_deriv


class BlowUpError(RuntimeError):
    """The discrete solution left the physical domain or became non-finite."""


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 2 or not self.x_max > self.x_min:
            raise ValueError("grid needs n >= 2 cells and x_max > x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n + 1)


@dataclass(frozen=True)
class Field:
    """Nodal values of ``v`` and a velocity (``h`` for the BD system, ``u`` for the raw one)."""

    grid: Grid
    v: np.ndarray
    h: np.ndarray
    t: float = 0.0

    def with_values(self, v, h, t) -> "Field":
        return replace(self, v=v, h=h, t=t)


def _check(v, h, gas: GasModel, t: float):
    bad = ~np.isfinite(v) | ~np.isfinite(h) | (v <= gas.v_min)
    if np.any(bad):
        j = int(np.argmax(bad))
        raise BlowUpError(f"solution left the domain at node {j}, t={t:.6g} (v={v[j]!r}, h={h[j]!r})")


def rhs_bd(v, h, dx: float, gas: GasModel):
    """Semi-discrete rates ``(v_t, h_t)`` of the (v, h) system; zero at the end nodes."""
    g = gas.gamma
    p = pressure(v, g)
    vb = v ** gas.beta
    face = 0.5 * (vb[1:] + vb[:-1]) * np.diff(p) / dx
    dv = np.zeros_like(v)
    dh = np.zeros_like(h)
    dv[1:-1] = (h[2:] - h[:-2]) / (2 * dx) - gas.diffusivity * np.diff(face) / dx
    dh[1:-1] = -(p[2:] - p[:-2]) / (2 * dx)
    return dv, dh


def rhs_raw(v, u, dx: float, gas: GasModel):
    """Semi-discrete rates ``(v_t, u_t)`` of the raw system; zero at the end nodes."""
    p = pressure(v, gas.gamma)
    kappa = gas.nu * gas.b * v ** (-gas.alpha - 1.0)
    face = 0.5 * (kappa[1:] + kappa[:-1]) * np.diff(u) / dx
    dv = np.zeros_like(v)
    du = np.zeros_like(u)
    dv[1:-1] = (u[2:] - u[:-2]) / (2 * dx)
    du[1:-1] = -(p[2:] - p[:-2]) / (2 * dx) + np.diff(face) / dx
    return dv, du


def stable_dt(field: Field, gas: GasModel, c_cfl: float = 0.4, c_diff: float = 0.25,
              raw: bool = False) -> float:
    """Largest step allowed by the advective and diffusive limits."""
    v, dx = field.v, field.grid.dx
    c = np.max(np.sqrt(-pressure_deriv(v, gas.gamma)))
    if raw:
        diff = np.max(gas.nu * gas.b * v ** (-gas.alpha - 1.0))
    else:
        diff = gas.diffusivity * np.max(v ** gas.beta * -pressure_deriv(v, gas.gamma))
    dt = c_cfl * dx / c
    if diff > 0:
        dt = min(dt, c_diff * dx * dx / diff)
    return float(dt)


def _heun(field: Field, dt: float, gas: GasModel, rhs) -> Field:
    if dt <= 0:
        raise ValueError("dt must be positive")
    dx = field.grid.dx
    v, h = field.v, field.h
    k1v, k1h = rhs(v, h, dx, gas)
    v1, h1 = v + dt * k1v, h + dt * k1h
    _check(v1, h1, gas, field.t + dt)
    k2v, k2h = rhs(v1, h1, dx, gas)
    vn = v + 0.5 * dt * (k1v + k2v)
    hn = h + 0.5 * dt * (k1h + k2h)
    _check(vn, hn, gas, field.t + dt)
    return field.with_values(vn, hn, field.t + dt)


def step(field: Field, dt: float, gas: GasModel) -> Field:
    """One Heun step of the (v, h) system."""
    return _heun(field, dt, gas, rhs_bd)


def raw_step(field: Field, dt: float, gas: GasModel) -> Field:
    """One Heun step of the raw (v, u) system; ``field.h`` holds ``u``."""
    return _heun(field, dt, gas, rhs_raw)


def evolve(field: Field, T: float, gas: GasModel, dt: Optional[float] = None,
           callback: Optional[Callable[[Field], None]] = None, cadence: int = 1,
           c_cfl: float = 0.4, c_diff: float = 0.25, raw: bool = False) -> Field:
    """Advance ``field`` to time ``T``.

    With ``dt`` None the step is recomputed from the stability limits before
    every step; the last step is shortened to land on ``T``.  ``callback`` is
    called on the initial field and after every ``cadence``-th step and on
    the final field.
    """
    stepper = raw_step if raw else step
    _check(field.v, field.h, gas, field.t)
    if callback:
        callback(field)
    k = 0
    while field.t < T * (1 - 1e-14):
        h = dt if dt is not None else stable_dt(field, gas, c_cfl, c_diff, raw)
        h = min(h, T - field.t)
        field = stepper(field, h, gas)
        k += 1
        if callback and (k % cadence == 0 or field.t >= T * (1 - 1e-14)):
            callback(field)
    return field


def snapshot_rows(field: Field, gas: GasModel) -> np.ndarray:
    """``(x, v, h, u)`` columns of a BD field."""
    x = field.grid.x
    u = inverse_bd_transform(field.v, field.h, field.grid.dx, gas)
    return np.column_stack([x, field.v, field.h, u])


def raw_to_bd(field: Field, gas: GasModel) -> Field:
    return field.with_values(field.v, bd_transform(field.v, field.h, field.grid.dx, gas), field.t)


def perturbation(x, spec: List[dict]):
    """Sum of Gaussian bumps and sines described by ``spec``.

    Each entry has ``kind`` ('gaussian' or 'sine'), ``field`` ('v' or 'h'),
    ``amplitude``, ``center`` and ``width`` (standard deviation, or wavelength
    for sines).  Returns ``(dv, dh)``.
    """
    x = np.asarray(x, dtype=float)
    out = {"v": np.zeros_like(x), "h": np.zeros_like(x)}
    for item in spec:
        kind = item.get("kind", "gaussian")
        name = item.get("field", "v")
        if name not in out:
            raise ValueError(f"unknown perturbed field {name!r}")
        A, c, w = float(item["amplitude"]), float(item.get("center", 0.0)), float(item["width"])
        if w <= 0:
            raise ValueError("perturbation width must be positive")
        if kind == "gaussian":
            out[name] += A * np.exp(-0.5 * ((x - c) / w) ** 2)
        elif kind == "sine":
            out[name] += A * np.sin(2 * np.pi * (x - c) / w)
        else:
            raise ValueError(f"unknown perturbation kind {kind!r}")
    return out["v"], out["h"]
