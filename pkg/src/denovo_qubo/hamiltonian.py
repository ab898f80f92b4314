"""Diagonal (Z-only) Pauli Hamiltonians and the TSP cost Hamiltonian."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .reads import OverlapGraph


@dataclass(eq=False)
class PauliHamiltonian:
    """Weighted sum of Z products; ``terms`` maps a sorted qubit tuple to its weight."""

    qubit_count: int
    terms: dict[tuple[int, ...], float] = field(default_factory=dict)

    def __post_init__(self):
        merged: dict[tuple[int, ...], float] = {}
        for support, c in self.terms.items():
            key = tuple(sorted(int(q) for q in support))
            if len(set(key)) != len(key):
                raise ValueError(f"repeated qubit in support {support}")
            if key and not (0 <= key[0] and key[-1] < self.qubit_count):
                raise ValueError(f"support {support} outside 0..{self.qubit_count - 1}")
            merged[key] = merged.get(key, 0.0) + float(c)
        self.terms = {k: v for k, v in merged.items() if v != 0.0}

    def add(self, coeff: float, *qubits: int) -> None:
        key = tuple(sorted(qubits))
        if key and not (0 <= key[0] and key[-1] < self.qubit_count):
            raise ValueError(f"support {qubits} outside 0..{self.qubit_count - 1}")
        v = self.terms.get(key, 0.0) + coeff
        if v == 0.0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = v

    def __len__(self):
        return len(self.terms)

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def diagonal(self) -> np.ndarray:
        """Eigenvalue on every basis state; bit ``q`` of the index is qubit ``q``."""
        if self.qubit_count > 24:
            raise ValueError("diagonal limited to 24 qubits")
        masks = [sum(1 << q for q in support) for support in self.terms]
        return kernels.z_diagonal(np.array(masks, dtype=np.int64),
                                  np.array(list(self.terms.values()), dtype=np.float64),
                                  self.qubit_count)

    def value(self, bits) -> float:
        """Eigenvalue on one basis state given as a 0/1 vector (qubit order)."""
        bits = np.asarray(bits)
        return float(sum(c * np.prod(1 - 2 * bits[list(s)]) for s, c in self.terms.items()))

    def __str__(self):
        return " + ".join(f"{c:g}*" + ("".join(f"Z{q}" for q in s) or "I") for s, c in self.items())


def build_cost_hamiltonian(graph: OverlapGraph, w: float = 100000.0) -> PauliHamiltonian:
    """Cost Hamiltonian on ``n**2`` qubits (qubit ``i*n + t``: node i at time t).

    Sum of: ``w Z_q`` on every qubit; for each pair of nodes sharing a time
    slot and each pair of slots of one node, ``-w/2 Z_a - w/2 Z_b +
    w/2 Z_a Z_b``; for every directed edge ``i -> j`` and slot ``r``,
    ``-d/4 Z_{i,r} - d/4 Z_{j,r+1} + d/4 Z_{i,r} Z_{j,r+1}`` with
    ``d = -weights[i, j]`` and the slot index taken modulo n.
    """
    n = graph.n
    if n < 2:
        raise ValueError("need at least 2 nodes")
    H = PauliHamiltonian(n * n)
    for q in range(n * n):
        H.add(w, q)
    half = w / 2.0
    for r in range(n):
        for i in range(1, n):
            for j in range(i):
                a, b = i * n + r, j * n + r
                H.add(-half, a)
                H.add(-half, b)
                H.add(half, a, b)
    for i in range(n):
        for r in range(1, n):
            for s in range(r):
                a, b = i * n + r, i * n + s
                H.add(-half, a)
                H.add(-half, b)
                H.add(half, a, b)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d = -float(graph.weights[i, j])
            for r in range(n):
                a, b = i * n + r, j * n + (r + 1) % n
                H.add(-d / 4.0, a)
                H.add(-d / 4.0, b)
                H.add(d / 4.0, a, b)
    return H
