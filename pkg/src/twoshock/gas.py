"""Thermodynamics of the barotropic gas with density-dependent viscosity.

Pressure law ``p(v) = v**(-gamma)``, viscosity ``mu(v) = b * v**(-alpha)``
with ``0 < alpha <= gamma <= alpha + 1``.  The module also provides the
entropy ``Q``, the relative functionals ``F(v|w)`` evaluated in a
cancellation-free way, the relative entropy of the BD variables and the
change of variables ``(v, u) <-> (v, h)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np


class DomainError(ValueError):
    """Raised when a state leaves the physical domain (v <= 0 or invalid exponents)."""


@dataclass(frozen=True)
class GasModel:
    """Exponents and scalings of the gas.

    Parameters
    ----------
    gamma : float
        Adiabatic exponent, ``gamma > 1``.
    alpha : float
        Viscosity exponent, ``alpha <= gamma <= alpha + 1``.
    b : float, optional
        Viscosity prefactor; defaults to ``gamma``.
    nu : float
        Viscosity strength.  ``nu = 1`` is the internal normalization.
    v_min : float
        Floor below which a specific volume is treated as vacuum.
    """

    gamma: float
    alpha: float
    b: Optional[float] = None
    nu: float = 1.0
    v_min: float = 1e-10

    def __post_init__(self):
        g, a = float(self.gamma), float(self.alpha)
        if not np.isfinite(g) or g <= 1.0:
            raise DomainError(f"gamma must be > 1, got {g}")
        if not np.isfinite(a) or a <= 0.0:
            raise DomainError(f"alpha must be > 0, got {a}")
        if not (a <= g <= a + 1.0):
            raise DomainError(f"need alpha <= gamma <= alpha + 1, got alpha={a}, gamma={g}")
        if self.b is None:
            object.__setattr__(self, "b", g)
        if self.b <= 0.0:
            raise DomainError(f"viscosity prefactor b must be > 0, got {self.b}")
        if self.nu < 0.0:
            raise DomainError(f"nu must be >= 0, got {self.nu}")

    @property
    def beta(self) -> float:
        """``gamma - alpha``, the power multiplying the diffusion in the (v, h) system."""
        return self.gamma - self.alpha

    @property
    def diffusivity(self) -> float:
        """Coefficient ``d`` in ``v_t - h_x = -d (v**beta p(v)_x)_x``."""
        return self.nu * self.b / self.gamma

    @property
    def bd_coefficient(self) -> float:
        """Coefficient ``k`` in ``h = u + k (p(v)**(alpha/gamma))_x``."""
        return self.nu * self.b / self.alpha

    def with_nu(self, nu: float) -> "GasModel":
        return GasModel(self.gamma, self.alpha, self.b, nu, self.v_min)

    # thin wrappers so callers can write ``gas.p(v)``
    def p(self, v):
        return pressure(v, self.gamma)

    def dp(self, v):
        return pressure_deriv(v, self.gamma)

    def Q(self, v):
        return entropy_Q(v, self.gamma)

    def check_volume(self, v) -> None:
        v = np.asarray(v, dtype=float)
        if not np.all(np.isfinite(v)) or np.any(v <= self.v_min):
            raise DomainError(f"specific volume left the domain: min v = {np.nanmin(v):.3e}")


class State(NamedTuple):
    """Constant state in the original variables."""

    v: float
    u: float


def _positive(v):
    v = np.asarray(v, dtype=float)
    if np.any(~(v > 0.0)):
        raise DomainError("specific volume must be positive")
    return v


def pressure(v, gamma: float):
    """``p(v) = v**(-gamma)``."""
    return _positive(v) ** (-gamma)


def pressure_deriv(v, gamma: float):
    """``p'(v) = -gamma v**(-gamma-1)``."""
    return -gamma * _positive(v) ** (-gamma - 1.0)


def pressure_second(v, gamma: float):
    """``p''(v) = gamma (gamma+1) v**(-gamma-2)``."""
    return gamma * (gamma + 1.0) * _positive(v) ** (-gamma - 2.0)


def pressure_inverse(p, gamma: float):
    """Volume with pressure ``p``."""
    p = np.asarray(p, dtype=float)
    if np.any(~(p > 0.0)):
        raise DomainError("pressure must be positive")
    return p ** (-1.0 / gamma)


def entropy_Q(v, gamma: float):
    """Internal energy ``Q(v) = v**(1-gamma) / (gamma-1)``, so ``Q' = -p``."""
    return _positive(v) ** (1.0 - gamma) / (gamma - 1.0)


def sound_speed(v, gamma: float):
    """Lagrangian sound speed ``sqrt(-p'(v))``."""
    return np.sqrt(-pressure_deriv(v, gamma))


# Taylor coefficients of (1+s)**m - 1 - m s, used for |s| small where the
# direct formula loses all significant digits.
_SERIES_CUT = 0.1
_SERIES_TERMS = 18


def _binomial_tail(s, m: float):
    """``(1+s)**m - 1 - m s`` evaluated without cancellation."""
    s = np.asarray(s, dtype=float)
    direct = np.expm1(m * np.log1p(s)) - m * s
    small = np.abs(s) < _SERIES_CUT
    if not np.any(small):
        return direct
    ss = np.where(small, s, 0.0)
    coef = m * (m - 1.0) / 2.0
    term = coef * ss * ss
    acc = term.copy()
    for k in range(3, _SERIES_TERMS + 1):
        term = term * ss * (m - k + 1.0) / k
        acc = acc + term
    return np.where(small, acc, direct)


def relative_Q(v, w, gamma: float):
    """``Q(v|w) = Q(v) - Q(w) - Q'(w)(v - w)``, accurate for ``v`` close to ``w``."""
    v, w = _positive(v), _positive(w)
    s = (v - w) / w
    return w ** (1.0 - gamma) * _binomial_tail(s, 1.0 - gamma) / (gamma - 1.0)


def relative_p(v, w, gamma: float):
    """``p(v|w) = p(v) - p(w) - p'(w)(v - w)``, accurate for ``v`` close to ``w``."""
    v, w = _positive(v), _positive(w)
    s = (v - w) / w
    return w ** (-gamma) * _binomial_tail(s, -gamma)


def pressure_difference(v, w, gamma: float):
    """``p(v) - p(w)`` without cancellation."""
    v, w = _positive(v), _positive(w)
    s = (v - w) / w
    return w ** (-gamma) * np.expm1(-gamma * np.log1p(s))


def relative_function(name: str, v, w, gamma: float):
    """Relative functional of ``Q`` or ``p`` selected by name."""
    if name == "Q":
        return relative_Q(v, w, gamma)
    if name == "p":
        return relative_p(v, w, gamma)
    raise ValueError(f"unknown functional {name!r}")


def relative_entropy_eta(v, h, v_ref, h_ref, gamma: float):
    """Pointwise ``eta(U|U_ref) = |h - h_ref|**2 / 2 + Q(v|v_ref)``."""
    return 0.5 * (np.asarray(h) - h_ref) ** 2 + relative_Q(v, v_ref, gamma)


def relative_E(v, u, dpow, v_ref, u_ref, dpow_ref, gas: GasModel):
    """Pointwise relative functional in the original variables.

    ``dpow`` is the spatial derivative of ``p(v)**(alpha/gamma)``; the result
    is ``|(u + k dpow) - (u_ref + k dpow_ref)|**2 / 2 + Q(v|v_ref)`` with
    ``k = gas.bd_coefficient``.
    """
    k = gas.bd_coefficient
    dh = (np.asarray(u) + k * np.asarray(dpow)) - (np.asarray(u_ref) + k * np.asarray(dpow_ref))
    return 0.5 * dh ** 2 + relative_Q(v, v_ref, gas.gamma)


def tri_identity_residual(name: str, u, w, v, gamma: float):
    """Residual of ``F(u|w) + F(w|v) - F(u|v) - (F'(w) - F'(v))(w - u)``.

    Returned together with a magnitude scale for relative comparisons.
    """
    if name == "Q":
        dF = lambda x: -pressure(x, gamma)
    elif name == "p":
        dF = lambda x: pressure_deriv(x, gamma)
    else:
        raise ValueError(f"unknown functional {name!r}")
    a = relative_function(name, u, w, gamma)
    b = relative_function(name, w, v, gamma)
    c = relative_function(name, u, v, gamma)
    d = (dF(w) - dF(v)) * (w - u)
    scale = np.abs(a) + np.abs(b) + np.abs(c) + np.abs(d)
    return a + b - c - d, scale


def _gradient(w, dx: float):
    """Second-order centered differences, one-sided second-order at the ends.

    Written in difference form so that constant data give exactly zero.
    """
    w = np.asarray(w, dtype=float)
    g = np.empty_like(w)
    g[1:-1] = (w[2:] - w[:-2]) / (2 * dx)
    g[0] = (4 * (w[1] - w[0]) - (w[2] - w[0])) / (2 * dx)
    g[-1] = ((w[-3] - w[-1]) - 4 * (w[-2] - w[-1])) / (2 * dx)
    return g


def bd_transform(v, u, dx: float, gas: GasModel):
    """Effective velocity ``h = u + k (p(v)**(alpha/gamma))_x`` on a uniform grid.

    Second-order centered differences inside, one-sided second-order at the ends.
    """
    v = _positive(v)
    w = pressure(v, gas.gamma) ** (gas.alpha / gas.gamma)
    return np.asarray(u, dtype=float) + gas.bd_coefficient * _gradient(w, dx)


def inverse_bd_transform(v, h, dx: float, gas: GasModel):
    """Recover ``u`` from ``(v, h)``; exact inverse of :func:`bd_transform`."""
    v = _positive(v)
    w = pressure(v, gas.gamma) ** (gas.alpha / gas.gamma)
    return np.asarray(h, dtype=float) - gas.bd_coefficient * _gradient(w, dx)


@dataclass
class InequalitySuiteReport:
    """Empirical constants and violations of the relative-function inequalities.

    ``c1``, ``c2`` are the largest constants with ``Q(v|w) >= c1 |v-w|**2``
    (for ``v <= 3 v_star``) and ``Q(v|w) >= c2 |v-w|`` (for ``v >= 3 v_star``),
    both over samples with ``w in (0, 2 v_star)``.  ``C_pressure`` is the
    smallest constant with ``p(v|w) <= C |v-w|**2`` over samples with
    ``v, w >= v_star / 2``.  Constants are ``nan`` when no sample falls in the
    regime.  The local lower bound on ``Q(v|w)`` has no free constant; its
    violations are counted over samples with ``|p(v)-p(w)| < delta`` and
    ``|p(w)-p(v_star)| < delta`` (all samples when ``delta`` is None).
    """

    c1: float
    c2: float
    C_pressure: float
    n_c1: int
    n_c2: int
    n_pressure: int
    local_violations: int
    local_worst_margin: float
    local_count: int
    local_delta_max: float


def local_Q_lower_bound(v, w, gamma: float):
    """Quadratic-minus-cubic lower bound of ``Q(v|w)`` in ``z = p(v) - p(w)``."""
    z = pressure_difference(v, w, gamma)
    pw = pressure(w, gamma)
    return (pw ** (-1.0 / gamma - 1.0) / (2.0 * gamma) * z ** 2
            - (1.0 + gamma) / (3.0 * gamma ** 2) * pw ** (-1.0 / gamma - 2.0) * z ** 3)


def check_inequality_suite(samples, gas: GasModel, v_star: float,
                           delta: Optional[float] = None) -> InequalitySuiteReport:
    """Evaluate the global and local relative-function inequalities on samples.

    Parameters
    ----------
    samples : array_like, shape (n, 2)
        Pairs ``(v, w)``.
    gas : GasModel
    v_star : float
        Reference volume of the regimes.
    delta : float, optional
        Size of the neighbourhood for the local bound.
    """
    s = np.asarray(samples, dtype=float).reshape(-1, 2)
    if s.shape[0] == 0:
        raise ValueError("empty sample set")
    g = gas.gamma
    v, w = _positive(s[:, 0]), _positive(s[:, 1])
    q = relative_Q(v, w, g)
    dv = np.abs(v - w)
    nz = dv > 0.0

    def _fit(mask, num, den, fn):
        m = mask & nz
        return (float(fn(num[m] / den[m])) if np.any(m) else float("nan")), int(np.count_nonzero(m))

    w_in = w < 2.0 * v_star
    c1, n1 = _fit(w_in & (v <= 3.0 * v_star), q, dv ** 2, np.min)
    c2, n2 = _fit(w_in & (v >= 3.0 * v_star), q, dv, np.min)
    pr = relative_p(v, w, g)
    Cp, n3 = _fit((v >= 0.5 * v_star) & (w > 0.5 * v_star), pr, dv ** 2, np.max)

    z = np.abs(pressure_difference(v, w, g))
    zstar = np.abs(pressure(w, g) - pressure(v_star, g))
    size = np.maximum(z, zstar)
    loc = np.ones_like(v, dtype=bool) if delta is None else size < delta
    margin = q - local_Q_lower_bound(v, w, g)
    bad = loc & (margin < 0.0)
    nbad = int(np.count_nonzero(bad))
    worst = float(np.min(margin[loc])) if np.any(loc) else float("nan")
    dmax = float(np.min(size[bad])) if nbad else (float(np.max(size[loc])) if np.any(loc) else float("nan"))
    return InequalitySuiteReport(c1, c2, Cp, n1, n2, n3, nbad, worst, int(np.count_nonzero(loc)), dmax)


def sample_local_pairs(n: int, gamma: float, z_max: float, w_center: float, w_halfwidth: float,
                       rng: np.random.Generator) -> np.ndarray:
    """Random pairs ``(v, w)`` with ``|w - w_center| <= w_halfwidth`` and ``|p(v) - p(w)| <= z_max``."""
    w = rng.uniform(w_center - w_halfwidth, w_center + w_halfwidth, n)
    z = rng.uniform(-z_max, z_max, n)
    pv = pressure(w, gamma) + z
    if np.any(pv <= 0):
        raise DomainError("z_max too large for the sampled w")
    return np.column_stack([pressure_inverse(pv, gamma), w])


def sample_global_pairs(n: int, v_star: float, rng: np.random.Generator) -> np.ndarray:
    """Random pairs with ``w`` uniform on ``(0, 2 v_star)`` and ``v`` uniform on ``(0, 6 v_star)``.

    Uniform sampling puts mass near the corners ``v = 3 v_star``, ``w -> 2 v_star``
    where the fitted constants are attained.
    """
    lo = 1e-3 * v_star
    v = rng.uniform(lo, 6.0 * v_star, n)
    w = rng.uniform(lo, 2.0 * v_star, n)
    return np.column_stack([v, w])
