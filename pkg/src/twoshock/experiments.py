"""Experiment drivers behind the command-line interface.

Each ``run_*`` function takes a validated :class:`ExperimentConfig` and an
output directory, writes its CSV files and a ``summary.json`` atomically and
returns the summary dictionary.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np

from .config import ConfigError, ExperimentConfig, _merge, load_config, preset, validate
from .functionals import (REPORT_COLUMNS, ContractionMonitor, EntropyReport, compute_budget,
                          localized_functionals, partition_phi,
                          prop_main_margin, shift_inputs, truncate)
from .gas import (DomainError, GasModel, State, bd_transform, check_inequality_suite,
                  inverse_bd_transform, sample_local_pairs, tri_identity_residual)
from .io import atomic_write_csv, atomic_write_json
from .poincare import rdelta_margin, search_violations
from .profiles import CompositeWave, build_composite, profile_residual, solve_profile
from .riemann import WaveFan, build_fan, fan_distance, fan_to_dict, lax_holds, rh_residuals
from .shifts import ShiftState, WeightPair, advance_shifts, shift_rhs, shift_rhs_explicit
from .solver import BlowUpError, Field, Grid, perturbation, raw_step, snapshot_rows, stable_dt, step

log = logging.getLogger(__name__)


class NumericalFailure(RuntimeError):
    """A run finished but failed its numerical acceptance check."""


# -- coupled evolution ---------------------------------------------------

@dataclass
class StepLog:
    t: float
    X1: float
    X2: float
    dX1: float
    dX2: float
    report: EntropyReport
    residual: float = float("nan")


@dataclass
class CoupledResult:
    field: Field
    shifts: ShiftState
    logs: List[StepLog]
    monitor: ContractionMonitor
    separation_violations: int
    min_gap_margin: float
    dt: float
    steps: int
    reports: List[EntropyReport] = dc_field(default_factory=list)


def _separation(shifts: ShiftState, fan: WaveFan):
    """``(ok, gap margin)`` of the separation bounds at the shift state's time."""
    t = shifts.t
    ok = shifts.X1 <= -0.5 * fan.sigma1 * t and shifts.X2 >= -0.5 * fan.sigma2 * t
    gap = (fan.sigma2 * t + shifts.X2) - (fan.sigma1 * t + shifts.X1) - 0.5 * (fan.sigma2 - fan.sigma1) * t
    return ok and gap >= 0, gap


def run_coupled(field: Field, wp: WeightPair, T: float, dt: Optional[float] = None,
                c_cfl: float = 0.4, c_diff: float = 0.25, delta1: float = 0.05,
                on_step: Optional[Callable[[Field, ShiftState, StepLog], None]] = None) -> CoupledResult:
    """Evolve the field together with the shifts up to ``T``.

    Both the field and the shifts use Heun's rule: the shift rate is
    evaluated at ``(U^n, X^n)`` and at the predicted ``(U^{n+1}, X^n + dt k1)``.
    The step is fixed for the run (from the initial stability limit, unless
    given).  The budget monitor sees the full report at every step.
    """
    fan, gas = wp.fan, wp.fan.gas
    if dt is None:
        dt = stable_dt(field, gas, c_cfl, c_diff)
    shifts = ShiftState(0.0, 0.0, field.t)
    mon = ContractionMonitor()
    logs: List[StepLog] = []
    n_bad, min_gap = 0, float("inf")
    steps = int(np.ceil(T / dt - 1e-9))
    dt = T / steps if steps else dt
    for k in range(steps + 1):
        rep = compute_budget(field, wp, shifts, delta1)
        k1 = shift_rhs(rep.Y1, rep.Y2, rep.Jbad, fan)
        rec = mon.update(rep, k1)
        if rec is not None:
            logs[-1].residual = rec.residual
        entry = StepLog(field.t, shifts.X1, shifts.X2, k1[0], k1[1], rep)
        logs.append(entry)
        if on_step:
            on_step(field, shifts, entry)
        if k == steps:
            break
        new = step(field, dt, gas)
        pred = ShiftState(shifts.X1 + dt * k1[0], shifts.X2 + dt * k1[1], shifts.t + dt)
        Y1, Y2, J = shift_inputs(new, wp, pred)
        k2 = shift_rhs(Y1, Y2, J, fan)
        shifts = advance_shifts(shifts, [k1, k2], dt, fan)
        ok, gap = _separation(shifts, fan)
        n_bad += 0 if ok else 1
        min_gap = min(min_gap, gap)
        field = new
    return CoupledResult(field, shifts, logs, mon, n_bad, min_gap if steps else 0.0, dt, steps)


def composite_setup(cfg: ExperimentConfig, gas: Optional[GasModel] = None):
    gas = gas or cfg.gas
    fan = build_fan(cfg.fan.U_minus, cfg.fan.eps1, cfg.fan.eps2, gas)
    wave = build_composite(fan)
    return fan, wave, WeightPair(cfg.lam, wave, fan)


def initial_field(cfg: ExperimentConfig, wave: CompositeWave) -> Field:
    grid = Grid(cfg.x_min, cfg.x_max, cfg.n)
    x = grid.x
    s = wave.sample(0.0, x)
    dv, dh = perturbation(x, cfg.perturbation)
    v, h = s.v + dv, s.h + dh
    # far-field nodes keep the end states
    v[0], h[0] = wave.profile1.left
    v[-1], h[-1] = wave.profile2.right
    return Field(grid, v, h, 0.0)


# -- commands ------------------------------------------------------------

def _summary(out: Path, command: str, cfg: ExperimentConfig, status: str, results: dict,
             files: List[str], t0: float) -> dict:
    doc = {"command": command, "status": status, "preset": cfg.name, "seed": cfg.seed,
           "fan": fan_to_dict(cfg.fan), "results": results, "files": sorted(files),
           "elapsed_s": round(time.time() - t0, 3)}
    atomic_write_json(out / "summary.json", doc)
    return doc


def run_profile(cfg: ExperimentConfig, out: Path) -> dict:
    """Profiles of the configured fan and a tail-decay fit over a strength sweep.

    ``decay_fit.csv`` has one row per swept strength (both families at
    ``eps1 = eps2 = eps``).
    """
    t0 = time.time()
    pc = cfg.profile
    tol = float(pc.get("residual_tol", 1e-6))
    factor = float(pc.get("dxi_factor", 0.01))
    d = cfg.gas.diffusivity
    files: List[str] = []
    worst = 0.0

    def solve(fan, fam, tag):
        nonlocal worst
        eps = fan.eps1 if fam == 1 else fan.eps2
        prof = solve_profile(fam, fan, dxi=factor * d / eps if eps > 0 else None)
        res = profile_residual(prof)
        worst = max(worst, res)
        name = f"profile_{tag}_family{fam}.csv"
        prof.to_csv(out / name)
        files.append(name)
        return prof, res

    for fam in (1, 2):
        solve(cfg.fan, fam, "config")
    rows = []
    for e in pc.get("eps_sweep", []):
        fan = build_fan(cfg.fan.U_minus, e, e, cfg.gas)
        (p1, r1), (p2, r2) = solve(fan, 1, f"eps{e:g}"), solve(fan, 2, f"eps{e:g}")
        rows.append([e, r1, r2, p1.decay_rate, p2.decay_rate, p1.decay_rate / e])
    atomic_write_csv(out / "decay_fit.csv", ["eps", "residual_family1", "residual_family2",
                                             "rate_family1", "rate_family2", "rate_over_eps"], rows)
    files.append("decay_fit.csv")
    ratio = np.array([r[-1] for r in rows])
    results = {"max_residual": worst, "residual_tol": tol, "rate_over_eps": ratio.tolist(),
               "rate_over_eps_spread": float(ratio.max() / ratio.min()) if ratio.size else None}
    status = "ok" if worst < tol else "residual_failure"
    doc = _summary(out, "profile", cfg, status, results, files, t0)
    if status != "ok":
        raise NumericalFailure(f"profile residual {worst:.3e} exceeds {tol:.1e}")
    return doc


def run_simulate(cfg: ExperimentConfig, out: Path) -> dict:
    """Evolve the perturbed composite wave without shifts; snapshots at the report cadence."""
    t0 = time.time()
    fan, wave, _ = composite_setup(cfg)
    f = initial_field(cfg, wave)
    dt = cfg.dt or stable_dt(f, cfg.gas, cfg.c_cfl, cfg.c_diff)
    steps = int(np.ceil(cfg.T / dt - 1e-9))
    dt = cfg.T / steps if steps else dt
    files = []

    def snap(field, k):
        name = f"snapshot_{k:06d}.csv"
        atomic_write_csv(out / name, ["x", "v", "h", "u"], snapshot_rows(field, cfg.gas))
        files.append(name)

    snap(f, 0)
    for k in range(1, steps + 1):
        f = step(f, dt, cfg.gas)
        if k % cfg.cadence == 0 or k == steps:
            snap(f, k)
    u = inverse_bd_transform(f.v, f.h, f.grid.dx, cfg.gas)
    dist = fan_distance(f.grid.x, f.v, u, fan, f.t)
    return _summary(out, "simulate", cfg, "ok", {"t": f.t, "steps": steps, "dt": dt,
                                                   "fan_distance": dist._asdict()}, files, t0)


TIMESERIES_COLUMNS = ("t", "X1", "X2", "dX1", "dX2") + tuple(c for c in REPORT_COLUMNS if c != "t") + (
    "budget_residual", "gap_margin", "prop_margin", "Yg1", "Yg2", "R_delta_1", "R_delta_2")


def run_contract(cfg: ExperimentConfig, out: Path) -> dict:
    """Shift-coupled evolution with the entropy-budget monitor."""
    t0 = time.time()
    fan, wave, wp = composite_setup(cfg)
    f = initial_field(cfg, wave)
    rows: List[list] = []
    pending: List[tuple] = []
    last = {"field": f}

    def on_step(field, shifts, entry):
        last["field"] = field
        k = len(pending)
        if k % cfg.cadence:
            pending.append((entry, None))
            return
        loc = {}
        if field.t > 0:
            tr = truncate(field, wp, shifts, cfg.delta1)
            loc = localized_functionals(tr, wp, shifts, partition_phi(field.t, shifts, fan))
        pending.append((entry, loc))

    try:
        res = run_coupled(f, wp, cfg.T, cfg.dt, cfg.c_cfl, cfg.c_diff, cfg.delta1, on_step)
    except BlowUpError:
        atomic_write_csv(out / "snapshot_last_good.csv", ["x", "v", "h", "u"], snapshot_rows(last["field"], cfg.gas))
        raise
    nan = float("nan")
    for idx, (entry, loc) in enumerate(pending):
        if loc is None and idx != len(pending) - 1:
            continue
        r = entry.report
        gap = (fan.sigma2 * r.t + entry.X2) - (fan.sigma1 * r.t + entry.X1) - 0.5 * (fan.sigma2 - fan.sigma1) * r.t
        loc = loc or {}
        Rd = [rdelta_margin(loc[i], e, cfg.lam, cfg.delta0) if i in loc else nan
              for i, e in ((1, fan.eps1), (2, fan.eps2))]
        rows.append([r.t, entry.X1, entry.X2, entry.dX1, entry.dX2] + r.row()[1:]
                    + [entry.residual, gap, prop_main_margin(r, fan, cfg.lam, cfg.delta0),
                       loc.get(1, {}).get("Yg", nan), loc.get(2, {}).get("Yg", nan)] + Rd)
    atomic_write_csv(out / "timeseries.csv", list(TIMESERIES_COLUMNS), rows)
    atomic_write_csv(out / "snapshot_final.csv", ["x", "v", "h", "u"], snapshot_rows(res.field, cfg.gas))
    reports = [lg.report for lg in res.logs]
    branches = np.array([[r.branch1, r.branch2] for r in reports])
    occupancy = {f"wave{i + 1}": {str(b): int(np.count_nonzero(branches[:, i] == b)) for b in range(4)}
                 for i in range(2)}
    sens = {}
    for d1 in (0.025, 0.05, 0.1):
        rep = compute_budget(res.field, wp, res.shifts, d1)
        sens[str(d1)] = {"B_delta": rep.B_delta, "G_delta": rep.G_delta}
    u = inverse_bd_transform(res.field.v, res.field.h, res.field.grid.dx, cfg.gas)
    dist = fan_distance(res.field.grid.x, res.field.v, u, fan, res.field.t, res.shifts.X1, res.shifts.X2)
    results = {
        "steps": res.steps, "dt": res.dt, "T": res.field.t,
        "max_budget_residual": res.monitor.max_residual,
        "ledger_constant": res.monitor.ledger_constant,
        "entropy_initial": reports[0].entropy, "entropy_final": reports[-1].entropy,
        "separation_violations": res.separation_violations,
        "min_gap_margin": res.min_gap_margin,
        "X1_final": res.shifts.X1, "X2_final": res.shifts.X2,
        "branch_occupancy": occupancy, "delta1_sensitivity": sens,
        "fan_distance": dist._asdict(),
    }
    status = "ok" if res.separation_violations == 0 else "separation_violated"
    doc = _summary(out, "contract", cfg, status, results, ["timeseries.csv", "snapshot_final.csv"], t0)
    if status != "ok":
        raise NumericalFailure("shift separation violated")
    return doc


# -- inviscid limit ------------------------------------------------------

def limit_case(raw: dict, nu: float) -> dict:
    """One viscosity of the limit study; runs in a worker process."""
    cfg = validate(raw)
    lim = cfg.limit
    gas = cfg.gas.with_nu(nu)
    fan, wave, wp = composite_setup(cfg, gas)
    T = float(lim.get("T", 1.0))
    reach = max(abs(fan.sigma1), abs(fan.sigma2)) * T + 1.0
    L = max(float(lim.get("core_half_width", 3.0)), reach) + float(lim.get("half_width_unit", 250.0)) * nu
    dx = float(lim.get("dx_unit", 0.25)) * nu
    n = int(np.ceil(2 * L / dx))
    grid = Grid(-L, L, n)
    x = grid.x
    s = wave.sample(0.0, x)
    dv, du = perturbation(x, lim.get("perturbation", []))
    v0, u0 = s.v + dv, s.u + du
    h0 = bd_transform(v0, u0, grid.dx, gas)
    h0[0], h0[-1] = fan.U_minus.u, fan.U_plus.u
    field = Field(grid, v0, h0, 0.0)
    t_start = time.time()
    try:
        res = run_coupled(field, wp, T, None, cfg.c_cfl, cfg.c_diff, cfg.delta1)
    except BlowUpError as exc:
        return {"nu": nu, "status": f"blow_up: {exc}"}
    f = res.field
    u = inverse_bd_transform(f.v, f.h, grid.dx, gas)
    dist = fan_distance(x, f.v, u, fan, f.t, res.shifts.X1, res.shifts.X2)
    return {"nu": nu, "status": "ok", "n": n, "dx": grid.dx, "dt": res.dt, "steps": res.steps,
            "l1_v": dist.l1_v, "l2_u": dist.l2_h, "entropy": dist.entropy,
            "X1": res.shifts.X1, "X2": res.shifts.X2,
            "separation_violations": res.separation_violations,
            "X1_over_t": res.shifts.X1 / T, "X2_over_t": res.shifts.X2 / T,
            "seconds": round(time.time() - t_start, 2)}


def scaling_self_test(cfg: ExperimentConfig, nu: float, steps: int = 200, n: int = 800) -> float:
    """Max difference between a raw run at ``nu`` and the rescaled run at ``nu = 1``.

    The ``nu = 1`` run uses grid step ``dx`` and time step ``dt``; the ``nu``
    run uses ``nu dx`` and ``nu dt`` with initial data ``U(x / nu)``.
    """
    g1 = cfg.gas.with_nu(1.0)
    gn = cfg.gas.with_nu(nu)
    fan, wave, _ = composite_setup(cfg, g1)
    L = 40.0
    grid1 = Grid(-L, L, n)
    s = wave.sample(0.0, grid1.x)
    dv, du = perturbation(grid1.x, [{"kind": "gaussian", "field": "v", "amplitude": 0.05,
                                     "center": 0.0, "width": 3.0}])
    f1 = Field(grid1, s.v + dv, s.u + du)
    fn = Field(Grid(-L * nu, L * nu, n), f1.v.copy(), f1.h.copy())
    dt = stable_dt(f1, g1, cfg.c_cfl, cfg.c_diff, raw=True)
    for _ in range(steps):
        f1 = raw_step(f1, dt, g1)
        fn = raw_step(fn, dt * nu, gn)
    return float(max(np.max(np.abs(f1.v - fn.v)), np.max(np.abs(f1.h - fn.h))))


def _pool_map(fn, args: List[tuple], threads: int) -> list:
    if threads <= 1 or len(args) <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        futs = [ex.submit(fn, *a) for a in args]
        return [f.result() for f in futs]


def run_limit(cfg: ExperimentConfig, out: Path, threads: int = 1) -> dict:
    """Fan distance at a fixed time across a decreasing viscosity list."""
    t0 = time.time()
    nus = list(cfg.limit.get("nu_list", []))
    rows = _pool_map(limit_case, [(cfg.raw, nu) for nu in nus], threads)
    ok = [r for r in rows if r["status"] == "ok"]
    l1 = [r["l1_v"] for r in ok]
    monotone = len(ok) == len(rows) and all(a > b for a, b in zip(l1, l1[1:]))
    scaling = {str(nu): scaling_self_test(cfg, nu) for nu in nus[:1]}
    cols = ["nu", "n", "dx", "dt", "steps", "l1_v", "l2_u", "entropy", "X1", "X2", "separation_violations"]
    atomic_write_csv(out / "limit.csv", cols,
                     [[r.get(c, float("nan")) for c in cols] for r in rows])
    results = {"rows": rows, "l1_monotone_decreasing": monotone, "scaling_self_test_max_diff": scaling}
    status = "ok" if monotone and all(r.get("separation_violations", 1) == 0 for r in rows) else "trend_failure"
    return _summary(out, "limit", cfg, status, results, ["limit.csv"], t0)


# -- Poincare map ----------------------------------------------------------

def poincare_cell(delta: float, C1: float, n: int, seed: int, degree: int, n_polish: int) -> dict:
    r = search_violations(delta, C1, n, seed, degree=degree, n_polish=n_polish)
    return {"delta": delta, "C1": C1, "seed": seed, "n_samples": n, "n_violations": r.n_violations,
            "max_lhs": r.max_lhs, "argmax": r.argmax.tolist()}


def run_poincare(cfg: ExperimentConfig, out: Path, threads: int = 1) -> dict:
    t0 = time.time()
    pc = cfg.poincare
    deltas = sorted(pc.get("deltas", []))
    C1s = sorted(pc.get("C1", []))
    n = int(pc.get("n_samples", 1000))
    degree = int(pc.get("degree", 8))
    n_polish = int(pc.get("n_polish", 10))
    args = [(d, c, n, cfg.seed, degree, n_polish) for c in C1s for d in deltas]
    cells = _pool_map(poincare_cell, args, threads)
    header = ["seed", "delta", "C1", "n_samples", "n_violations", "lhs", "margin"] + \
        [f"c{k}" for k in range(degree + 1)]
    rows = [[c["seed"], c["delta"], c["C1"], c["n_samples"], c["n_violations"], c["max_lhs"],
             -c["max_lhs"]] + c["argmax"] for c in cells]
    atomic_write_csv(out / "poincare.csv", header, rows)
    boundary = {}
    for C1 in C1s:
        bad = [c["delta"] for c in cells if c["C1"] == C1 and c["n_violations"] > 0]
        boundary[str(C1)] = min(bad) if bad else None
    return _summary(out, "poincare", cfg, "ok", {"first_violating_delta": boundary,
                                                 "cells": len(cells)}, ["poincare.csv"], t0)


# -- invariant suites ------------------------------------------------------

def _suite_riemann(rng) -> dict:
    worst, lax_fail = 0.0, 0
    for _ in range(1000):
        g = float(rng.choice([1.4, 2.0, 3.0]))
        gas = GasModel(g, max(1.0, g - 1.0))  # alpha does not enter the Riemann data
        fan = build_fan(State(rng.uniform(0.5, 1.2), rng.uniform(-1, 1)),
                        rng.uniform(0, 0.3), rng.uniform(0, 0.3), gas)
        worst = max(worst, float(np.max(np.abs(rh_residuals(fan)))))
        lax_fail += not lax_holds(fan)
    return {"passed": worst < 1e-10 and lax_fail == 0, "max_rh_residual": worst, "lax_failures": lax_fail}


def _suite_gas(rng) -> dict:
    gas = GasModel(1.4, 1.0)
    rep = check_inequality_suite(sample_local_pairs(10_000, 1.4, 0.05, 1.0, 0.05, rng), gas, 1.0)
    u, w, v = (rng.uniform(0.3, 3.0, 10_000) for _ in range(3))
    tri = 0.0
    for name in ("Q", "p"):
        res, scale = tri_identity_residual(name, u, w, v, 1.4)
        tri = max(tri, float(np.max(np.abs(res) / np.maximum(scale, 1e-300))))
    return {"passed": rep.local_violations == 0 and tri < 1e-10,
            "local_violations": rep.local_violations, "tri_identity_rel": tri}


def _suite_profiles(cfg: ExperimentConfig) -> dict:
    worst = max(profile_residual(solve_profile(i, cfg.fan)) for i in (1, 2)
                if (cfg.fan.eps1, cfg.fan.eps2)[i - 1] > 0)
    return {"passed": worst < 1e-6, "max_residual": worst}


def _suite_shifts(cfg: ExperimentConfig, rng) -> dict:
    fan = cfg.fan
    scale = max(fan.eps1, fan.eps2) ** 2
    worst = 0.0
    for _ in range(10_000):
        Y1, Y2 = rng.uniform(-3 * scale, 3 * scale, 2)
        J = rng.uniform(-5, 5)
        a = np.array(shift_rhs(Y1, Y2, J, fan))
        b = np.array(shift_rhs_explicit(Y1, Y2, J, fan))
        worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1.0))))
    return {"passed": worst < 1e-10, "max_branch_mismatch": worst}


def _suite_budget(cfg: ExperimentConfig, rng, n_fields: int = 5) -> dict:
    fan, wave, wp = composite_setup(cfg)
    grid = Grid(-60.0, 60.0, 1200)
    worst = 0.0
    for k in range(n_fields):
        s = wave.sample(0.0, grid.x)
        spec = [{"kind": "gaussian", "field": fld, "amplitude": float(rng.uniform(-0.2, 0.2)),
                 "center": float(rng.uniform(-10, 10)), "width": float(rng.uniform(1, 5))}
                for fld in ("v", "h", "v", "h")]
        dv, dh = perturbation(grid.x, spec)
        f = Field(grid, s.v + dv, s.h + dh, 0.0)
        sh = ShiftState(float(rng.uniform(-0.5, 0.5)), float(rng.uniform(-0.5, 0.5)), 0.0)
        try:
            r = compute_budget(f, wp, sh, cfg.delta1, check=False)
        except DomainError:
            continue
        scale = sum(abs(v) for v in r.terms.values()) + abs(r.Jbad) + abs(r.Jgood)
        worst = max(worst, abs((r.Jbad - r.Jgood) - (r.B_delta - r.G_delta)) / scale)
    return {"passed": worst < 1e-10, "max_identity_rel": worst}


def _suite_poincare(cfg: ExperimentConfig) -> dict:
    r = search_violations(0.005, 5.0, 2000, cfg.seed, n_polish=5)
    return {"passed": r.n_violations == 0, "max_lhs": r.max_lhs}


def _suite_config() -> dict:
    bad = [{"lambda": 0.05}, {"fan": {"eps1": -0.1}}, {"grid": {"x_min": -10.0, "x_max": 10.0}},
           {"limit": {"nu_list": [0.05, 0.1]}}, {"c_diff": 0.9}]
    rejected = 0
    for over in bad:
        try:
            validate(_merge(preset("shallow-water-0.1"), over))
        except ConfigError:
            rejected += 1
    return {"passed": rejected == len(bad), "rejected": rejected, "cases": len(bad)}


def run_check(cfg: ExperimentConfig, out: Path) -> dict:
    """Run every invariant suite; the summary holds a per-suite verdict."""
    t0 = time.time()
    rng = np.random.default_rng(cfg.seed)
    suites = {
        "riemann": lambda: _suite_riemann(rng),
        "gas": lambda: _suite_gas(rng),
        "profiles": lambda: _suite_profiles(cfg),
        "shifts": lambda: _suite_shifts(cfg, rng),
        "budget_identity": lambda: _suite_budget(cfg, rng),
        "poincare": lambda: _suite_poincare(cfg),
        "config": _suite_config,
    }
    verdict = {}
    for name, fn in suites.items():
        try:
            verdict[name] = fn()
        except Exception as exc:  # a crashing suite is a failing suite
            verdict[name] = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
        log.info("suite %s: %s", name, "pass" if verdict[name]["passed"] else "FAIL")
    ok = all(v["passed"] for v in verdict.values())
    doc = _summary(out, "check", cfg, "ok" if ok else "failed", verdict, [], t0)
    if not ok:
        raise NumericalFailure("invariant suite failed: " +
                               ", ".join(k for k, v in verdict.items() if not v["passed"]))
    return doc


def preset_contract_job(name: str, dt_factor: float = 1.0) -> dict:
    """Coupled run of a preset with its stable step scaled by ``dt_factor``.

    Returns plain data so that it can run in a worker process.
    """
    cfg = load_config(None, {"preset": name})
    fan, wave, wp = composite_setup(cfg)
    f = initial_field(cfg, wave)
    dt = (cfg.dt or stable_dt(f, cfg.gas, cfg.c_cfl, cfg.c_diff)) * dt_factor
    res = run_coupled(f, wp, cfg.T, dt, cfg.c_cfl, cfg.c_diff, cfg.delta1)
    reps = [lg.report for lg in res.logs]
    return {
        "preset": name, "dt": res.dt, "steps": res.steps,
        "max_residual": res.monitor.max_residual,
        "separation_violations": res.separation_violations,
        "min_gap_margin": res.min_gap_margin,
        "eps1": fan.eps1,
        "log": [(lg.t, lg.dX1, lg.dX2, lg.report.Jbad, lg.report.branch1, lg.report.branch2) for lg in res.logs],
        "entropy": [r.entropy for r in reps],
    }
