"""Variational QAOA loop: compile, simulate, measure, optimize, restart."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .circuit import MAX_QUBITS, compile_ansatz, hamiltonian_expectation, simulate
from .hamiltonian import PauliHamiltonian
from .neldermead import nelder_mead
from .sampleset import BINARY, SampleSet


@dataclass(frozen=True)
class QaoaConfig:
    """Settings for :func:`run_qaoa`.

    ``initial`` holds ``(gamma_1..gamma_p, beta_1..beta_p)`` for the first
    restart; later restarts (and the first, if ``initial`` is None) draw
    angles uniformly from ``[0, 2 pi)`` with ``seed``. ``maxiter=0`` just
    evaluates the starting point.
    """

    layers: int = 1
    initial: tuple[float, ...] | None = None
    maxiter: int | None = None
    tol: float = 1e-6
    restarts: int = 1
    seed: int = 0
    top_k: int = 10

    def __post_init__(self):
        if self.layers < 1:
            raise ValueError("layers must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.maxiter is not None and self.maxiter < 0:
            raise ValueError("maxiter must be >= 0")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.initial is not None:
            object.__setattr__(self, "initial", tuple(float(v) for v in self.initial))
            if len(self.initial) != 2 * self.layers:
                raise ValueError(f"initial needs {2 * self.layers} angles, got {len(self.initial)}")
            if not all(np.isfinite(self.initial)):
                raise ValueError("initial angles must be finite")


@dataclass(frozen=True)
class BasisState:
    bitstring: str  # qubit 0 first
    probability: float
    energy: float  # diagonal of H_C


@dataclass(eq=False)
class QaoaResult:
    params: np.ndarray
    expectation: float
    state: np.ndarray
    top: list[BasisState]
    restart_values: list[float]  # final expectation of each restart
    best_so_far: list[float]  # running minimum over restarts
    evaluations: list[tuple[int, list[float], float]] = field(default_factory=list)

    @property
    def gammas(self) -> np.ndarray:
        return self.params[: len(self.params) // 2]

    @property
    def betas(self) -> np.ndarray:
        return self.params[len(self.params) // 2:]

    def sample(self, shots: int, seed: int = 0, diagonal: np.ndarray | None = None) -> SampleSet:
        """Measure the final state ``shots`` times in the computational basis."""
        probs = np.abs(self.state) ** 2
        probs /= probs.sum()
        q = int(self.state.size).bit_length() - 1
        idx = np.random.default_rng(seed).choice(self.state.size, size=shots, p=probs)
        states = ((idx[:, None] >> np.arange(q)[None, :]) & 1).astype(np.int8)
        if diagonal is None:
            energy = lambda s: np.full(len(s), np.nan)  # noqa: E731
        else:
            weights = 1 << np.arange(q)
            energy = lambda s: diagonal[s.astype(np.int64) @ weights]  # noqa: E731
        return SampleSet.aggregate(states, energy, BINARY, tuple(range(q)))

    def report(self) -> dict:
        return {
            "params": {"gamma": self.gammas.tolist(), "beta": self.betas.tolist()},
            "expectation": self.expectation,
            "restart_values": self.restart_values,
            "best_so_far": self.best_so_far,
            "top": [{"bitstring": b.bitstring, "probability": b.probability, "energy": b.energy}
                    for b in self.top],
        }


def ranked_states(psi: np.ndarray, diagonal: np.ndarray, k: int) -> list[BasisState]:
    """The ``k`` most probable basis states; ties go to the lower index."""
    probs = np.abs(psi) ** 2
    q = int(psi.size).bit_length() - 1
    order = np.lexsort((np.arange(psi.size), -probs))[:k]
    return [BasisState("".join(str((int(b) >> j) & 1) for j in range(q)),
                       float(probs[b]), float(diagonal[b])) for b in order]


def run_qaoa(H: PauliHamiltonian, config: QaoaConfig = QaoaConfig(),
             log: Callable[[str], None] | None = None) -> QaoaResult:
    """Optimize the QAOA angles for ``H``, keeping the best of ``config.restarts`` runs.

    ``log`` receives one JSON line per objective evaluation and one final
    summary line.
    """
    if H.qubit_count > MAX_QUBITS:
        raise ValueError(f"QAOA simulation limited to {MAX_QUBITS} qubits")
    ansatz = compile_ansatz(H, config.layers)
    diagonal = H.diagonal()
    rng = np.random.default_rng(config.seed)
    evaluations: list[tuple[int, list[float], float]] = []
    restart = 0

    def objective(params):
        value = hamiltonian_expectation(H, simulate(ansatz.bind(params), H.qubit_count), diagonal)
        evaluations.append((restart, [float(v) for v in params], value))
        if log is not None:
            log(json.dumps({"restart": restart, "params": [float(v) for v in params],
                            "expectation": value}))
        return value

    best_params, best_value = None, np.inf
    restart_values, best_so_far = [], []
    for restart in range(config.restarts):
        # always draw, so restart k sees the same angles whether or not `initial` is set
        drawn = rng.uniform(0.0, 2 * np.pi, size=ansatz.num_parameters)
        x0 = np.array(config.initial) if restart == 0 and config.initial is not None else drawn
        res = nelder_mead(objective, x0, maxiter=config.maxiter, tol=config.tol)
        restart_values.append(res.fun)
        if res.fun < best_value:
            best_params, best_value = res.x, res.fun
        best_so_far.append(best_value)

    psi = simulate(ansatz.bind(best_params), H.qubit_count)
    result = QaoaResult(best_params, hamiltonian_expectation(H, psi, diagonal), psi,
                        ranked_states(psi, diagonal, config.top_k), restart_values,
                        best_so_far, evaluations)
    if log is not None:
        log(json.dumps({"final": result.report()}))
    return result


def expectation_at(H: PauliHamiltonian, params: Sequence[float], layers: int = 1) -> float:
    """One-shot ``<H>`` for fixed angles, no optimization."""
    ansatz = compile_ansatz(H, layers)
    return hamiltonian_expectation(H, simulate(ansatz.bind(params), H.qubit_count))
