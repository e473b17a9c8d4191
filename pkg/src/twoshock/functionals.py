"""Weighted relative-entropy functionals around the shifted composite wave.

All integrals are trapezoidal sums over the solver nodes.  Composite-wave
quantities (values and derivatives) are exact in the sense of the profile
interpolant; derivatives of the numerical field use second-order centered
differences (``numpy.gradient``).

Terms of the entropy budget, with ``P = p(v) - p(v~)``, ``H = h - h~``,
``d`` the diffusivity and ``Omega = {P <= delta}``::

    B1i   = sigma_i int a v~_i' p(v|v~)
    B2i-  = int_{Omega^c} (a_i)' P H
    B2i+  = 1/(2 sigma_i) int_Omega (a_i)' P^2
    B3i   = -d int (a_i)' v^beta P P'
    B4i   = -d int (a_i)' P (v^beta - v~^beta) p(v~)'
    B5    = -d int a P' (v^beta - v~^beta) p(v~)'
    B6    = int a P E1 - int a H E2
    G1i-  = sigma_i/2 int_{Omega^c} (a_i)' H^2
    G1i+  = sigma_i/2 int_Omega (a_i)' (H - P/sigma_i)^2
    G2i   = sigma_i int (a_i)' Q(v|v~)
    D     = d int a v^beta P'^2
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional

import numpy as np
from scipy.integrate import trapezoid

from .gas import (pressure, pressure_deriv, pressure_difference, pressure_inverse,
                  pressure_second, relative_p, relative_Q)
from .profiles import CompositeSample
from .riemann import StructureError, WaveFan
from .shifts import ShiftState, WeightPair, Weights, shift_branch
from .solver import Field


class IdentityError(RuntimeError):
    """The budget decomposition identity failed beyond rounding tolerance."""


# Stable column order of the budget terms.
TERM_NAMES = (
    "B1_1", "B1_2", "B2_1_minus", "B2_2_minus", "B2_1_plus", "B2_2_plus",
    "B3_1", "B3_2", "B4_1", "B4_2", "B5", "B6",
    "G1_1_minus", "G1_2_minus", "G1_1_plus", "G1_2_plus", "G2_1", "G2_2", "D",
)
REPORT_COLUMNS = ("t", "Y1", "Y2", "Jbad", "Jgood", "B_delta", "G_delta", "entropy",
                  "E1_norm", "E2_norm", "branch1", "branch2") + TERM_NAMES

IDENTITY_RTOL = 1e-10


@dataclass
class EntropyReport:
    t: float
    Y1: float
    Y2: float
    Jbad: float
    Jgood: float
    B_delta: float
    G_delta: float
    entropy: float
    E1_norm: float
    E2_norm: float
    branch1: int
    branch2: int
    terms: Dict[str, float] = dc_field(default_factory=dict)

    def row(self) -> List[float]:
        head = [getattr(self, k) for k in REPORT_COLUMNS[:12]]
        return head + [self.terms[k] for k in TERM_NAMES]

    @property
    def good_terms_nonnegative(self) -> bool:
        return all(self.terms[k] >= 0 for k in TERM_NAMES if k.startswith("G") or k == "D")


@dataclass
class _Frame:
    """Arrays shared by the functionals at one time level."""

    x: np.ndarray
    dx: float
    v: np.ndarray
    h: np.ndarray
    s: CompositeSample
    w: Weights
    P: np.ndarray
    H: np.ndarray
    dP: np.ndarray
    px_t: np.ndarray
    dP_f: np.ndarray     # face differences of P, aligned with the solver's diffusive flux
    ptx_f: np.ndarray    # face differences of p(v~)


def _frame(field: Field, wp: WeightPair, shifts: ShiftState) -> _Frame:
    g = wp.fan.gas.gamma
    x, dx = field.grid.x, field.grid.dx
    s = wp.wave.sample(field.t, x, shifts.X1, shifts.X2)
    w = wp.from_sample(s)
    v, h = field.v, field.h
    P = pressure_difference(v, s.v, g)
    px_t = pressure_deriv(s.v, g) * s.v_x
    dP = np.gradient(pressure(v, g), dx, edge_order=2) - px_t
    pt = pressure(s.v, g)
    return _Frame(x, dx, v, h, s, w, P, h - s.h, dP, px_t, np.diff(P) / dx, np.diff(pt) / dx)


def _Y(fr: _Frame, wp: WeightPair):
    g = wp.fan.gas.gamma
    eta = 0.5 * fr.H ** 2 + relative_Q(fr.v, fr.s.v, g)
    hess_v = -pressure_deriv(fr.s.v, g) * (fr.v - fr.s.v)
    out = []
    for da, wi in ((fr.w.da1, fr.s.w1), (fr.w.da2, fr.s.w2)):
        integrand = -da * eta + fr.w.a * (wi.v_x * hess_v + wi.h_x * fr.H)
        out.append(float(trapezoid(integrand, fr.x)))
    return out[0], out[1], eta


def compute_Y(field: Field, wp: WeightPair, shifts: ShiftState):
    """``(Y1, Y2)``: the derivatives of the weighted relative entropy in the shifts."""
    Y1, Y2, _ = _Y(_frame(field, wp, shifts), wp)
    return Y1, Y2


def interaction_errors(s: CompositeSample, gas) -> tuple:
    """``(E1, E2)``: flux and pressure-gradient defects of the superposition."""
    g, b, d = gas.gamma, gas.beta, gas.diffusivity
    v, vx = s.v, s.v_x
    vxx = s.w1.v_xx + s.w2.v_xx
    dp = pressure_deriv(v, g)
    flux_x = b * v ** (b - 1.0) * vx * dp * vx + v ** b * (pressure_second(v, g) * vx ** 2 + dp * vxx)
    E1 = d * (flux_x - s.w1.flux_x - s.w2.flux_x)
    E2 = dp * vx - s.w1.p_x - s.w2.p_x
    return E1, E2


def _integral(f, x):
    return float(trapezoid(f, x))


def _avg(f):
    return 0.5 * (f[1:] + f[:-1])


def _face_integral(f_face, dx):
    """Midpoint sum over cell faces."""
    return float(np.sum(f_face) * dx)


def good_terms(fr: _Frame, wp: WeightPair, omega: np.ndarray) -> Dict[str, float]:
    """Quadratic (good) terms of the decomposition."""
    g, d = wp.fan.gas.gamma, wp.fan.gas.diffusivity
    sig = (wp.fan.sigma1, wp.fan.sigma2)
    out = {}
    q = relative_Q(fr.v, fr.s.v, g)
    for i, da in ((1, fr.w.da1), (2, fr.w.da2)):
        si = sig[i - 1]
        out[f"G1_{i}_minus"] = 0.5 * si * _integral(np.where(omega, 0.0, da * fr.H ** 2), fr.x)
        out[f"G1_{i}_plus"] = 0.5 * si * _integral(np.where(omega, da * (fr.H - fr.P / si) ** 2, 0.0), fr.x)
        out[f"G2_{i}"] = si * _integral(da * q, fr.x)
    vb_f = _avg(fr.v ** wp.fan.gas.beta)
    out["D"] = d * _face_integral(_avg(fr.w.a) * vb_f * fr.dP_f ** 2, fr.dx)
    return out


def compute_budget(field: Field, wp: WeightPair, shifts: ShiftState, delta1: float = 0.05,
                   check: bool = True) -> EntropyReport:
    """Full entropy budget at the current time.

    Evaluates ``Y_i``, ``J^bad``, ``J^good``, the split terms of ``B_delta``
    and ``G_delta`` and the weighted relative entropy ``int a eta``.  With
    ``check`` the identity ``Jbad - Jgood = B_delta - G_delta`` is verified.
    """
    if delta1 <= 0:
        raise ValueError("delta1 must be positive")
    fan, gas = wp.fan, wp.fan.gas
    g, beta, d = gas.gamma, gas.beta, gas.diffusivity
    fr = _frame(field, wp, shifts)
    Y1, Y2, eta = _Y(fr, wp)
    x, a, P, H = fr.x, fr.w.a, fr.P, fr.H
    omega = P <= delta1
    E1, E2 = interaction_errors(fr.s, gas)
    vb = fr.v ** beta
    dvb = vb - fr.s.v ** beta
    prel = relative_p(fr.v, fr.s.v, g)
    sig = (fan.sigma1, fan.sigma2)

    t = {}
    cross = []
    for i, (da, wi) in enumerate(((fr.w.da1, fr.s.w1), (fr.w.da2, fr.s.w2)), start=1):
        si = sig[i - 1]
        t[f"B1_{i}"] = si * _integral(a * wi.v_x * prel, x)
        t[f"B2_{i}_minus"] = _integral(np.where(omega, 0.0, da * P * H), x)
        t[f"B2_{i}_plus"] = _integral(np.where(omega, da * P ** 2, 0.0), x) / (2 * si)
        t[f"B3_{i}"] = -d * _face_integral(_avg(da * P) * _avg(vb) * fr.dP_f, fr.dx)
        t[f"B4_{i}"] = -d * _integral(da * P * dvb * fr.px_t, x)
        cross.append(_integral(da * P * H, x))
    t["B5"] = -d * _face_integral(_avg(a) * fr.dP_f * _avg(dvb) * fr.ptx_f, fr.dx)
    t["B6"] = _integral(a * P * E1, x) - _integral(a * H * E2, x)
    t.update(good_terms(fr, wp, omega))

    Jbad = sum(cross[i - 1] + t[f"B1_{i}"] + t[f"B3_{i}"] + t[f"B4_{i}"] for i in (1, 2)) + t["B5"] + t["B6"]
    # J^good is assembled from its own integrals, independently of the split
    # terms, so that the identity below is a genuine cross-check.
    q = relative_Q(fr.v, fr.s.v, g)
    Jgood = sum(sig[i] * _integral(da * (0.5 * H ** 2 + q), x)
                for i, da in enumerate((fr.w.da1, fr.w.da2)))
    Jgood += d * _face_integral(_avg(a) * _avg(vb) * fr.dP_f ** 2, fr.dx)
    B = sum(t[k] for k in TERM_NAMES if k.startswith("B"))
    G = sum(t[k] for k in TERM_NAMES if k.startswith("G") or k == "D")
    if check:
        scale = sum(abs(v) for v in t.values()) + abs(Jbad) + abs(Jgood) + 1e-300
        if abs((Jbad - Jgood) - (B - G)) > IDENTITY_RTOL * scale:
            raise IdentityError(f"Jbad-Jgood={Jbad - Jgood:.16e} but B-G={B - G:.16e}")
    report = EntropyReport(
        t=field.t, Y1=Y1, Y2=Y2, Jbad=Jbad, Jgood=Jgood, B_delta=B, G_delta=G,
        entropy=_integral(a * eta, x), E1_norm=_integral(np.abs(E1), x),
        E2_norm=_integral(np.abs(E2), x),
        branch1=shift_branch(Y1, fan.eps1, 1), branch2=shift_branch(Y2, fan.eps2, 2), terms=t)
    return report


def shift_inputs(field: Field, wp: WeightPair, shifts: ShiftState):
    """``(Y1, Y2, Jbad)``, the inputs of the shift rate, without the full report."""
    r = compute_budget(field, wp, shifts, check=False)
    return r.Y1, r.Y2, r.Jbad


def weighted_entropy(field: Field, wp: WeightPair, shifts: ShiftState) -> float:
    """``int a eta(U | U~)``."""
    fr = _frame(field, wp, shifts)
    eta = 0.5 * fr.H ** 2 + relative_Q(fr.v, fr.s.v, wp.fan.gas.gamma)
    return _integral(fr.w.a * eta, fr.x)


# -- truncation and localization ---------------------------------------

@dataclass(frozen=True)
class TruncatedField:
    """``v`` with ``p(v) - p(v~)`` clamped to ``[-delta1, delta1]`` (two- and one-sided)."""

    t: float
    x: np.ndarray
    bar_v: np.ndarray
    bar_v_s: np.ndarray
    bar_v_b: np.ndarray
    omega: np.ndarray
    delta1: float


def truncate(field: Field, wp: WeightPair, shifts: ShiftState, delta1: float = 0.05) -> TruncatedField:
    g = wp.fan.gas.gamma
    x = field.grid.x
    vt = wp.wave.sample(field.t, x, shifts.X1, shifts.X2).v
    P = pressure_difference(field.v, vt, g)
    pt = pressure(vt, g)

    def back(q):
        # untouched nodes keep v exactly
        return np.where(q == P, field.v, pressure_inverse(pt + q, g))
    return TruncatedField(field.t, x, back(np.clip(P, -delta1, delta1)),
                          back(np.minimum(P, delta1)), back(np.maximum(P, -delta1)),
                          P <= delta1, delta1)


@dataclass(frozen=True)
class Partition:
    """``phi1 = 1`` left of ``left``, linear down to 0 at ``right``; ``phi2 = 1 - phi1``."""

    left: float
    right: float

    def phi1(self, x):
        x = np.asarray(x, dtype=float)
        if self.right == self.left:
            return np.where(x <= self.left, 1.0, 0.0)
        return np.clip((self.right - x) / (self.right - self.left), 0.0, 1.0)

    def phi2(self, x):
        return 1.0 - self.phi1(x)

    def dphi1(self, x):
        x = np.asarray(x, dtype=float)
        if self.right == self.left:
            return np.zeros_like(x)
        inside = (x > self.left) & (x < self.right)
        return np.where(inside, -1.0 / (self.right - self.left), 0.0)

    @property
    def slope(self) -> float:
        return 0.0 if self.right == self.left else 1.0 / (self.right - self.left)


def partition_phi(t: float, shifts: ShiftState, fan: WaveFan) -> Partition:
    left = 0.5 * (shifts.X1 + fan.sigma1 * t)
    right = 0.5 * (shifts.X2 + fan.sigma2 * t)
    if left > right:
        raise StructureError(f"partition midpoints crossed: {left:.6g} > {right:.6g}")
    return Partition(left, right)


LOCAL_NAMES = ("Yg", "I1", "I2", "G2", "D")


def localized_functionals(tr: TruncatedField, wp: WeightPair, shifts: ShiftState,
                          part: Partition) -> Dict[int, Dict[str, float]]:
    """Per-wave localized functionals of the truncated volume.

    Each wave ``i`` is compared with its own profile ``v~_i`` and cut off by
    ``phi_i``; returns ``{i: {"Yg", "I1", "I2", "G2", "D"}}``.
    """
    fan, gas = wp.fan, wp.fan.gas
    g = gas.gamma
    x = tr.x
    v = tr.bar_v
    s = wp.wave.sample(tr.t, x, shifts.X1, shifts.X2)
    w = wp.from_sample(s)
    pv_x = np.gradient(pressure(v, g), x, edge_order=2)
    phis = {1: (part.phi1(x), part.dphi1(x)), 2: (part.phi2(x), -part.dphi1(x))}
    out = {}
    for i, wi, da, si in ((1, s.w1, w.da1, fan.sigma1), (2, s.w2, w.da2, fan.sigma2)):
        phi, dphi = phis[i]
        P = pressure_difference(v, wi.v, g)
        pt = pressure(wi.v, g)
        q = relative_Q(v, wi.v, g)
        Yg = (-_integral(da * phi ** 2 * P ** 2, x) / (2 * si ** 2)
              - _integral(da * phi ** 2 * q, x)
              - _integral(w.a * wi.p_x * phi * (v - wi.v), x)
              + _integral(w.a * wi.h_x * phi * P, x) / si)
        I1 = si * _integral(w.a * wi.v_x * phi ** 2 * relative_p(v, wi.v, g), x)
        I2 = _integral(da * phi ** 2 * P ** 2, x) / (2 * si)
        G2 = si * _integral(da * (pt ** (-1 / g - 1) / (2 * g) * phi ** 2 * P ** 2
                                  - (1 + g) / (3 * g ** 2) * pt ** (-1 / g - 2) * phi ** 3 * P ** 3), x)
        grad = dphi * P + phi * (pv_x - wi.p_x)
        D = gas.diffusivity * _integral(w.a * v ** gas.beta * grad ** 2, x)
        out[i] = {"Yg": Yg, "I1": I1, "I2": I2, "G2": G2, "D": D}
    return out


def interaction_functionals(wave, t: float, x, X1: float = 0.0, X2: float = 0.0):
    """``int |v~_1'| |v~ - v~_1|`` and ``int |v~_1'| |v~_2'|``: overlap of the two layers."""
    s = wave.sample(t, x, X1, X2)
    f1 = _integral(np.abs(s.w1.v_x) * np.abs(s.v - s.w1.v), x)
    f2 = _integral(np.abs(s.w1.v_x) * np.abs(s.w2.v_x), x)
    return f1, f2


# -- budget monitor -------------------------------------------------------

@dataclass
class MonitorRecord:
    t: float
    entropy: float
    rate: float
    predicted: float
    residual: float
    ledger: float


class ContractionMonitor:
    """Compares the discrete rate of ``int a eta`` with the budget identity.

    Feed consecutive reports with the shift velocities used at the earlier
    time.  The residual of the forward difference is ``O(dt) + O(dx^2)``.
    The ledger tracks ``(entropy(t) + int_0^t G_delta) / (entropy(0) + 1)``.
    """

    def __init__(self):
        self.records: List[MonitorRecord] = []
        self._prev: Optional[EntropyReport] = None
        self._prev_rates = None
        self._goods = 0.0
        self._e0: Optional[float] = None

    def update(self, report: EntropyReport, rates) -> Optional[MonitorRecord]:
        if self._e0 is None:
            self._e0 = report.entropy
        rec = None
        if self._prev is not None:
            p = self._prev
            dt = report.t - p.t
            rate = (report.entropy - p.entropy) / dt
            predicted = self._prev_rates[0] * p.Y1 + self._prev_rates[1] * p.Y2 + p.Jbad - p.Jgood
            self._goods += 0.5 * dt * (p.G_delta + report.G_delta)
            rec = MonitorRecord(p.t, p.entropy, rate, predicted, rate - predicted,
                                (report.entropy + self._goods) / (self._e0 + 1.0))
            self.records.append(rec)
        self._prev, self._prev_rates = report, rates
        return rec

    @property
    def max_residual(self) -> float:
        return max((abs(r.residual) for r in self.records), default=0.0)

    @property
    def ledger_constant(self) -> float:
        return max((r.ledger for r in self.records), default=1.0)


def monitor_contraction(reports, rates) -> ContractionMonitor:
    """Run a :class:`ContractionMonitor` over a report stream."""
    m = ContractionMonitor()
    for r, q in zip(reports, rates):
        m.update(r, q)
    return m


def prop_main_margin(r: EntropyReport, fan: WaveFan, lam: float, delta0: float) -> float:
    """Shift-weighted budget combination expected to be non-positive for small ``Y``.

    Sums the ``Y``-dependent shift contributions (piecewise in ``Y_i``),
    ``B_delta + delta0 min(eps)/lam |B_delta|`` and the good terms with the
    reduced factors ``1 - delta0 eps_i/lam`` on ``G2_i`` and ``1 - delta0`` on ``D``.
    """
    e1, e2, s1, s2 = fan.eps1, fan.eps2, fan.sigma1, fan.sigma2
    Y1, Y2 = r.Y1, r.Y2
    m = 0.0
    if 0 <= Y1 <= e1 ** 2:
        m -= Y1 ** 2 / e1 ** 4
    elif -e1 ** 2 <= Y1 < 0:
        m += s1 / (2 * e1 ** 2) * Y1 ** 2
    elif Y1 < -e1 ** 2:
        m -= 0.5 * s1 * Y1
    if -e2 ** 2 <= Y2 <= 0:
        m -= Y2 ** 2 / e2 ** 4
    elif 0 < Y2 <= e2 ** 2:
        m -= s2 / (2 * e2 ** 2) * Y2 ** 2
    elif Y2 > e2 ** 2:
        m -= 0.5 * s2 * Y2
    T = r.terms
    m += r.B_delta + delta0 * min(e1, e2) / lam * abs(r.B_delta)
    m -= T["G1_1_minus"] + T["G1_1_plus"] + T["G1_2_minus"] + T["G1_2_plus"]
    m -= (1 - delta0 * e1 / lam) * T["G2_1"] + (1 - delta0 * e2 / lam) * T["G2_2"]
    m -= (1 - delta0) * T["D"]
    return float(m)
