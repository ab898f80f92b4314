"""Derivative-free Nelder-Mead simplex minimizer."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5
NONZERO_NUDGE, ZERO_NUDGE = 0.05, 0.00025


@dataclass(frozen=True)
class NelderMeadResult:
    x: np.ndarray
    fun: float
    nit: int
    nfev: int
    converged: bool


def initial_simplex(x0) -> np.ndarray:
    """``x0`` plus one vertex per coordinate, that coordinate scaled by 1.05.

    Coordinates equal to zero are moved to 0.00025 instead.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    sim = np.tile(x0, (len(x0) + 1, 1))
    for k in range(len(x0)):
        sim[k + 1, k] = (1 + NONZERO_NUDGE) * x0[k] if x0[k] != 0 else ZERO_NUDGE
    return sim


def nelder_mead(f: Callable[[np.ndarray], float], x0, maxiter: int | None = None,
                tol: float = 1e-8, xtol: float | None = 1e-4,
                callback: Callable[[np.ndarray, float], None] | None = None) -> NelderMeadResult:
    """Minimize ``f`` from ``x0``.

    Stops after ``maxiter`` iterations (default ``200 * dim``) or once the
    spread of function values over the simplex is below ``tol`` and every
    vertex lies within ``xtol`` of the best one per coordinate. The
    coordinate test keeps a simplex straddling the minimum symmetrically
    (equal values, far apart) from stopping early; ``xtol=None`` drops it.
    ``maxiter=0`` evaluates ``x0`` alone and returns it.
    ``callback(x_best, f_best)`` runs after every iteration.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=np.float64))
    if x0.ndim != 1 or not x0.size:
        raise ValueError("x0 must be a non-empty vector")
    if not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be finite")
    dim = x0.size
    maxiter = 200 * dim if maxiter is None else int(maxiter)
    if maxiter < 0:
        raise ValueError("maxiter must be >= 0")

    nfev = 0
    if maxiter == 0:
        return NelderMeadResult(x0.copy(), float(f(x0)), 0, 1, False)

    def evaluate(x):
        nonlocal nfev
        nfev += 1
        return float(f(x))

    sim = initial_simplex(x0)
    fs = np.array([evaluate(v) for v in sim])
    nit = 0
    converged = False
    while True:
        order = np.argsort(fs, kind="stable")
        sim, fs = sim[order], fs[order]
        if fs[-1] - fs[0] < tol and (xtol is None or np.max(np.abs(sim[1:] - sim[0])) <= xtol):
            converged = True
            break
        if nit >= maxiter:
            break
        nit += 1
        centroid = sim[:-1].mean(axis=0)
        xr = centroid + REFLECT * (centroid - sim[-1])
        fr = evaluate(xr)
        if fr < fs[0]:
            xe = centroid + EXPAND * (xr - centroid)
            fe = evaluate(xe)
            sim[-1], fs[-1] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
        else:
            if fr < fs[-1]:
                xc = centroid + CONTRACT * (xr - centroid)
                fc = evaluate(xc)
                accept = fc <= fr
            else:
                xc = centroid + CONTRACT * (sim[-1] - centroid)
                fc = evaluate(xc)
                accept = fc < fs[-1]
            if accept:
                sim[-1], fs[-1] = xc, fc
            else:
                for k in range(1, dim + 1):
                    sim[k] = sim[0] + SHRINK * (sim[k] - sim[0])
                    fs[k] = evaluate(sim[k])
        if callback is not None:
            k = int(np.argmin(fs))
            callback(sim[k].copy(), float(fs[k]))
    return NelderMeadResult(sim[0].copy(), float(fs[0]), nit, nfev, converged)
