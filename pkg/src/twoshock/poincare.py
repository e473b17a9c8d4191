"""Numerical harness for the weighted Poincare-type inequality on [0, 1].

For ``W`` in ``L^2(0, 1)`` and small ``delta`` the quantity

    -(1/delta)(int W^2 + 2 int W)^2 + (1+delta) int W^2 + (2/3) int W^3
        + delta int |W|^3 - (1-delta) int y(1-y) |W'|^2

is expected to be non-positive whenever ``int W^2 <= C1``.  Test functions
are finite Legendre expansions ``W(y) = sum_k c_k P_k(2y - 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Sequence

import numpy as np
from numpy.polynomial import legendre as L

VIOLATION_TOL = -1e-8   # a margin above this counts as a violation


@dataclass(frozen=True)
class TestProfileW:
    """Legendre coefficients of ``W`` on [0, 1]."""

    __test__ = False  # not a pytest class

    coeffs: np.ndarray

    @property
    def l2_squared(self) -> float:
        k = np.arange(len(self.coeffs))
        return float(np.sum(np.asarray(self.coeffs) ** 2 / (2 * k + 1)))

    def __call__(self, y):
        return L.legval(2 * np.asarray(y, dtype=float) - 1, self.coeffs)

    def deriv(self, y):
        return 2 * L.legval(2 * np.asarray(y, dtype=float) - 1, L.legder(self.coeffs))


@lru_cache(maxsize=16)
def _rule(quad_n: int, order: int = 6):
    """Composite Gauss-Legendre nodes/weights on [0, 1] (never hits the endpoints)."""
    panels = max(1, quad_n // order)
    z, w = L.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    h = np.diff(edges)
    y = (edges[:-1, None] + 0.5 * h[:, None] * (z[None, :] + 1)).ravel()
    wt = (0.5 * h[:, None] * w[None, :]).ravel()
    return y, wt


@lru_cache(maxsize=16)
def _basis(quad_n: int, degree: int):
    y, wt = _rule(quad_n)
    eye = np.eye(degree + 1)
    B = np.stack([L.legval(2 * y - 1, eye[k]) for k in range(degree + 1)], axis=1)
    dB = np.stack([2 * L.legval(2 * y - 1, L.legder(eye[k])) if k else np.zeros_like(y)
                   for k in range(degree + 1)], axis=1)
    return y, wt, B, dB


def winst_lhs_batch(coeffs, delta: float, quad_n: int = 600) -> np.ndarray:
    """Left-hand side for each row of ``coeffs`` (shape ``(N, K+1)``)."""
    if not (0 < delta < 1):
        raise ValueError("delta must lie in (0, 1)")
    C = np.atleast_2d(np.asarray(coeffs, dtype=float))
    y, wt, B, dB = _basis(quad_n, C.shape[1] - 1)
    W = C @ B.T
    dW = C @ dB.T
    k = np.arange(C.shape[1])
    m2 = np.sum(C ** 2 / (2 * k + 1), axis=1)     # exact int W^2
    m1 = C[:, 0]                                 # exact int W
    m3 = (W ** 3) @ wt
    a3 = (np.abs(W) ** 3) @ wt
    dd = (dW ** 2) @ (wt * y * (1 - y))
    return (-(m2 + 2 * m1) ** 2 / delta + (1 + delta) * m2 + (2.0 / 3.0) * m3
            + delta * a3 - (1 - delta) * dd)


def winst_lhs(W: TestProfileW, delta: float, quad_n: int = 600) -> float:
    return float(winst_lhs_batch(np.asarray(W.coeffs)[None, :], delta, quad_n)[0])


def constant_lhs(c: float, delta: float) -> float:
    """Closed form of the left-hand side for ``W = c``."""
    return -(c * c + 2 * c) ** 2 / delta + (1 + delta) * c * c + (2.0 / 3.0) * c ** 3 + delta * abs(c) ** 3


def _l2sq(C):
    k = np.arange(C.shape[-1])
    return np.sum(C ** 2 / (2 * k + 1), axis=-1)


# Samples keep int W^2 >= MIN_FRACTION * C1: the left-hand side tends to 0
# as W -> 0, where the inequality degenerates to an equality.
MIN_FRACTION = 1e-3


def _project(C, C1):
    """Scale rows so that ``MIN_FRACTION C1 <= int W^2 <= C1``."""
    n = np.maximum(_l2sq(C), 1e-300)
    lo = MIN_FRACTION * C1
    s = np.where(n > C1, np.sqrt(C1 / n), np.where(n < lo, np.sqrt(lo / n), 1.0))
    return C * s[:, None]


def sample_profiles(n: int, C1: float, degree: int, rng: np.random.Generator) -> np.ndarray:
    """Random Legendre coefficients with ``int W^2 <= C1``.

    Half the samples are generic directions with ``int W^2`` uniform on
    ``[MIN_FRACTION C1, C1]``; the other half sit near the set ``int W^2 + 2 int W = 0``
    where the penalty term vanishes.
    """
    k = np.arange(degree + 1)
    norm = np.sqrt(2 * k + 1)
    n_a = n // 2
    A = rng.standard_normal((n_a, degree + 1)) / (1 + k) * norm
    r2 = rng.uniform(MIN_FRACTION * C1, C1, n_a)
    A *= np.sqrt(r2 / np.maximum(_l2sq(A), 1e-300))[:, None]
    n_b = n - n_a
    Bc = rng.standard_normal((n_b, degree + 1)) / (1 + k) * norm
    Bc[:, 0] = 0.0
    m = rng.uniform(0, 1, n_b) ** 2
    Bc *= np.sqrt(m / np.maximum(_l2sq(Bc), 1e-300))[:, None]
    root = np.sqrt(1 - m)
    Bc[:, 0] = np.where(rng.random(n_b) < 0.5, -1 - root, -1 + root)
    Bc += 1e-3 * rng.standard_normal(Bc.shape) * norm
    return _project(np.vstack([A, Bc]), C1)


def polish(C: np.ndarray, delta: float, C1: float, iters: int = 50, quad_n: int = 600,
           h: float = 1e-6) -> np.ndarray:
    """Finite-difference ascent on the coefficients, staying in the sampled annulus."""
    C = np.array(C, dtype=float)
    f = winst_lhs_batch(C, delta, quad_n)
    step = np.full(C.shape[0], 1e-2)
    K = C.shape[1]
    for _ in range(iters):
        grad = np.empty_like(C)
        for j in range(K):
            E = C.copy()
            E[:, j] += h
            grad[:, j] = (winst_lhs_batch(E, delta, quad_n) - f) / h
        gn = np.linalg.norm(grad, axis=1) + 1e-300
        trial = _project(C + (step / gn)[:, None] * grad, C1)
        ft = winst_lhs_batch(trial, delta, quad_n)
        better = ft > f
        C[better], f[better] = trial[better], ft[better]
        step = np.where(better, step * 1.5, step * 0.5)
    return C


@dataclass
class SearchResult:
    delta: float
    C1: float
    seed: int
    max_lhs: float
    argmax: np.ndarray
    n_violations: int
    margins: np.ndarray
    coeffs: np.ndarray

    @property
    def passed(self) -> bool:
        return self.n_violations == 0


def search_violations(delta: float, C1: float = 5.0, n_samples: int = 10_000, seed: int = 0,
                      degree: int = 8, n_polish: int = 20, iters: int = 50,
                      quad_n: int = 600) -> SearchResult:
    """Random plus locally polished search for a positive left-hand side.

    A sample is a violation when its value exceeds ``VIOLATION_TOL``.  The
    ``n_polish`` best random samples are refined by finite-difference ascent
    and appended to the sample set.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    C = sample_profiles(n_samples, C1, degree, rng)
    lhs = winst_lhs_batch(C, delta, quad_n)
    if n_polish > 0:
        top = np.argsort(lhs)[::-1][:n_polish]
        P = polish(C[top], delta, C1, iters, quad_n)
        C = np.vstack([C, P])
        lhs = np.concatenate([lhs, winst_lhs_batch(P, delta, quad_n)])
    j = int(np.argmax(lhs))
    return SearchResult(delta, C1, seed, float(lhs[j]), C[j].copy(),
                        int(np.count_nonzero(lhs > VIOLATION_TOL)), lhs, C)


def violation_boundary(deltas: Sequence[float], C1: float = 5.0, n_samples: int = 2000,
                       seed: int = 0, **kw):
    """Largest margin found at each ``delta`` and the first ``delta`` with a violation."""
    rows = [search_violations(d, C1, n_samples, seed, **kw) for d in sorted(deltas)]
    first = next((r.delta for r in rows if r.n_violations > 0), None)
    return rows, first


def rdelta_margin(loc: Dict[str, float], eps: float, lam: float, delta: float) -> float:
    """Combination of the localized functionals expected to be non-positive.

    ``-|Yg|^2/(eps delta) + I1 + delta|I1| + I2 + delta (eps/lam)|I2|
    - (1 - delta eps/lam) G2 - (1 - delta) D``.
    """
    r = eps / lam
    return (-loc["Yg"] ** 2 / (eps * delta) + loc["I1"] + delta * abs(loc["I1"])
            + loc["I2"] + delta * r * abs(loc["I2"]) - (1 - delta * r) * loc["G2"]
            - (1 - delta) * loc["D"])
