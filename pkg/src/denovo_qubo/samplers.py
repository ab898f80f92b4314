"""Exact enumeration and simulated annealing for QUBO and Ising models."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .ising import IsingModel, qubo_to_ising
from .qubo import QuboModel
from .sampleset import BINARY, SPIN, SampleSet

EXACT_CAP = 24
_THRESHOLD_BUDGET = 1 << 23  # doubles of pre-drawn randomness held at once


class TooLargeError(ValueError):
    """Instance exceeds what a solver is willing to handle."""


def _quadratic_form(model):
    """``(linear, upper couplings, spin?, variables)`` for either model type."""
    if isinstance(model, QuboModel):
        U = model.canonical()
        return np.diag(U).copy(), np.triu(U, 1), False, tuple(range(model.N))
    if isinstance(model, IsingModel):
        h, J = model.dense()
        return h, J, True, model.variables
    raise TypeError(f"expected QuboModel or IsingModel, got {type(model).__name__}")


def _index_states(idx: np.ndarray, n: int, spin: bool) -> np.ndarray:
    out = np.empty((idx.shape[0], n), dtype=np.int8)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    for start in range(0, idx.shape[0], kernels.ENUM_CHUNK):
        part = idx[start:start + kernels.ENUM_CHUNK]
        bits = ((part[:, None] >> shifts[None, :]) & 1).astype(np.int8)
        out[start:start + len(part)] = 2 * bits - 1 if spin else bits
    return out


def solve_exact(model, cap: int = EXACT_CAP) -> SampleSet:
    """All ``2**N`` states, ascending by energy.

    Ties are broken by the state read as an unsigned integer with variable
    0 as the most significant bit. ``cap`` may be lowered but not raised
    past :data:`EXACT_CAP`.
    """
    linear, quad, spin, variables = _quadratic_form(model)
    n = len(linear)
    cap = min(cap, EXACT_CAP)
    if n > cap:
        raise TooLargeError(f"exact solver handles at most {cap} variables, model has {n}")
    energies = kernels.enumerate_energies(linear, quad, spin)
    order = np.argsort(energies, kind="stable")
    return SampleSet(_index_states(order, n, spin), energies[order],
                     np.ones(len(order), dtype=np.int64), SPIN if spin else BINARY, variables)


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric inverse-temperature schedule for :func:`solve_sa`.

    ``beta_start``/``beta_end`` left as ``None`` are picked per instance by
    :func:`default_beta_range`.
    """

    sweeps: int = 1000
    reads: int = 1000
    beta_start: float | None = None
    beta_end: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if self.reads < 1:
            raise ValueError("reads must be >= 1")
        for name in ("beta_start", "beta_end"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive")
        if self.beta_start is not None and self.beta_end is not None and not self.beta_start < self.beta_end:
            raise ValueError("beta_start must be below beta_end")

    def betas(self, h: np.ndarray, J: np.ndarray) -> np.ndarray:
        lo, hi = default_beta_range(h, J)
        start = self.beta_start if self.beta_start is not None else lo
        end = self.beta_end if self.beta_end is not None else hi
        if self.beta_end is None and self.beta_start is not None and end <= start:
            end = start * 1000.0
        if self.beta_start is None and start >= end:
            start = end / 1000.0
        if self.sweeps == 1:
            return np.array([end])
        return np.geomspace(start, end, self.sweeps)


def default_beta_range(h: np.ndarray, J: np.ndarray) -> tuple[float, float]:
    """``(0.01, 10 / median |nonzero coefficient|)``, start lowered if needed."""
    coeffs = np.abs(np.concatenate([np.ravel(h), np.ravel(J)]))
    coeffs = coeffs[coeffs > 0]
    if not coeffs.size:
        return 0.01, 1.0
    end = 10.0 / float(np.median(coeffs))
    start = 0.01 if end > 0.01 else end / 1000.0
    return start, end


def solve_sa(model, schedule: AnnealSchedule = AnnealSchedule()) -> SampleSet:
    """Single-flip Metropolis annealing with ``schedule.reads`` restarts.

    The sweep runs on the Ising form of the model; reported states and
    energies are in the model's own domain. Same model, schedule and seed
    give the same result on both kernel paths.
    """
    if isinstance(model, QuboModel):
        ising = qubo_to_ising(model)
        h, J = ising.dense()
        vartype, variables = BINARY, tuple(range(model.N))
    elif isinstance(model, IsingModel):
        h, J = model.dense()
        vartype, variables = SPIN, model.variables
    else:
        raise TypeError(f"expected QuboModel or IsingModel, got {type(model).__name__}")
    n = len(h)
    if n == 0:
        return SampleSet(np.zeros((1, 0), np.int8), [0.0], [schedule.reads], vartype, variables)
    coupling = np.ascontiguousarray(J + J.T)
    betas = schedule.betas(h, J)
    rng = np.random.default_rng(schedule.seed)
    spins = rng.choice(np.array([-1.0, 1.0]), size=(schedule.reads, n))
    fields = h[None, :] + spins @ coupling
    chunk = max(1, _THRESHOLD_BUDGET // (schedule.reads * n))
    for start in range(0, len(betas), chunk):
        part = np.ascontiguousarray(betas[start:start + chunk])
        thresholds = rng.standard_exponential((schedule.reads, len(part), n))
        kernels.metropolis_sweeps(coupling, spins, fields, part, thresholds)
    states = spins.astype(np.int8)
    if vartype == BINARY:
        states = (states + 1) // 2
    return SampleSet.aggregate(states, model.energies, vartype, variables)
