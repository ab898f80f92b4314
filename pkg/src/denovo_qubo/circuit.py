"""Gate lists, the QAOA ansatz, and a statevector simulator.

Conventions: ``RZ(theta) = diag(exp(-i theta/2), exp(i theta/2))``,
``RX(theta) = exp(-i theta X / 2)``; qubit ``q`` is bit ``q`` of the
amplitude index.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .hamiltonian import PauliHamiltonian

MAX_QUBITS = 24
_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)


class Gate(NamedTuple):
    name: str  # "H", "RX", "RZ" or "CNOT"
    qubits: tuple[int, ...]
    angle: float = 0.0


def rz_matrix(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=np.complex128)


def rx_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def gate_matrix(gate: Gate) -> np.ndarray:
    if gate.name == "H":
        return _H
    if gate.name == "RX":
        return rx_matrix(gate.angle)
    if gate.name == "RZ":
        return rz_matrix(gate.angle)
    raise ValueError(f"{gate.name} is not a one-qubit gate")


def simulate(gates: Sequence[Gate], qubits: int, state: np.ndarray | None = None) -> np.ndarray:
    """Apply ``gates`` to ``|0...0>`` (or a copy of ``state``)."""
    if qubits > MAX_QUBITS:
        raise ValueError(f"simulator limited to {MAX_QUBITS} qubits")
    if state is None:
        psi = np.zeros(1 << qubits, dtype=np.complex128)
        psi[0] = 1.0
    else:
        psi = np.array(state, dtype=np.complex128)
        if psi.shape != (1 << qubits,):
            raise ValueError("state has the wrong dimension")
    for g in gates:
        if any(not 0 <= q < qubits for q in g.qubits):
            raise ValueError(f"{g} addresses a qubit outside 0..{qubits - 1}")
        if g.name == "CNOT":
            c, t = g.qubits
            if c == t:
                raise ValueError("CNOT control equals target")
            kernels.apply_cnot(psi, c, t)
        else:
            if not np.isfinite(g.angle):
                raise ValueError(f"non-finite angle in {g}")
            kernels.apply_1q(psi, g.qubits[0], gate_matrix(g))
    return psi


def hamiltonian_expectation(H: PauliHamiltonian, psi: np.ndarray, diagonal: np.ndarray | None = None) -> float:
    """Exact ``<psi|H|psi>`` from amplitudes; pass ``diagonal`` to reuse it."""
    diag = H.diagonal() if diagonal is None else diagonal
    if diag.shape != psi.shape:
        raise ValueError("state and Hamiltonian sizes differ")
    return float(np.dot(np.abs(psi) ** 2, diag))


class _Slot(NamedTuple):
    name: str
    qubits: tuple[int, ...]
    scale: float  # angle = scale * parameter
    param: int  # index into (gamma_1..gamma_p, beta_1..beta_p); -1 for fixed gates


@dataclass(frozen=True)
class Ansatz:
    """QAOA circuit with ``2 * layers`` free angles, gammas first."""

    qubits: int
    layers: int
    slots: tuple[_Slot, ...]

    @property
    def num_parameters(self) -> int:
        return 2 * self.layers

    def bind(self, params: Sequence[float]) -> list[Gate]:
        params = np.asarray(params, dtype=np.float64)
        if params.shape != (self.num_parameters,):
            raise ValueError(f"expected {self.num_parameters} parameters")
        return [Gate(s.name, s.qubits, 0.0 if s.param < 0 else s.scale * params[s.param])
                for s in self.slots]


def compile_ansatz(H: PauliHamiltonian, layers: int = 1) -> Ansatz:
    """Hadamards, then per layer: Z terms as RZ, ZZ terms as CNOT-RZ-CNOT, RX mixer.

    A term with weight ``c`` becomes a rotation by ``2 c gamma``; the mixer
    rotates every qubit by ``2 beta``.
    """
    if layers < 1:
        raise ValueError("layers must be >= 1")
    n = H.qubit_count
    slots = [_Slot("H", (q,), 0.0, -1) for q in range(n)]
    terms = H.items()
    for support, _ in terms:
        if len(support) > 2:
            raise ValueError(f"term on {support} has more than two qubits")
    for k in range(layers):
        gamma, beta = k, layers + k
        for support, c in terms:
            if len(support) == 1:
                slots.append(_Slot("RZ", support, 2.0 * c, gamma))
            elif len(support) == 2:
                a, b = support
                slots.append(_Slot("CNOT", (a, b), 0.0, -1))
                slots.append(_Slot("RZ", (b,), 2.0 * c, gamma))
                slots.append(_Slot("CNOT", (a, b), 0.0, -1))
        slots.extend(_Slot("RX", (q,), 2.0, beta) for q in range(n))
    return Ansatz(n, layers, tuple(slots))
