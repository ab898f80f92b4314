"""Ising form of a QUBO, with the offset tracked exactly.

Energy convention: ``E(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j`` with
coefficients used as stored (no leading minus signs). The offset is kept
apart, so ``E(s) + offset`` equals the QUBO energy of ``x = (s + 1) / 2``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .qubo import QuboModel


@dataclass(eq=False)
class IsingModel:
    h: dict[int, float]
    J: dict[tuple[int, int], float]
    offset: float = 0.0
    variables: tuple[int, ...] = ()
    labels: list[str] | None = field(default=None)

    def __post_init__(self):
        J = {}
        for (i, j), v in self.J.items():
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-coupling on {i}")
            key = (i, j) if i < j else (j, i)
            J[key] = J.get(key, 0.0) + float(v)
        self.J = {k: v for k, v in J.items() if v != 0.0}
        self.h = {int(k): float(v) for k, v in self.h.items()}
        if not self.variables:
            seen = set(self.h)
            for i, j in self.J:
                seen.update((i, j))
            self.variables = tuple(sorted(seen))
        else:
            self.variables = tuple(int(v) for v in self.variables)
            missing = (set(self.h) | {v for k in self.J for v in k}) - set(self.variables)
            if missing:
                raise ValueError(f"coefficients on undeclared variables {sorted(missing)}")

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """``(h, J_upper)`` in ``variables`` order."""
        pos = {v: k for k, v in enumerate(self.variables)}
        n = len(self.variables)
        h = np.zeros(n)
        for v, b in self.h.items():
            h[pos[v]] = b
        J = np.zeros((n, n))
        for (u, v), c in self.J.items():
            a, b = sorted((pos[u], pos[v]))
            J[a, b] += c
        return h, J

    def energy(self, s) -> float:
        return ising_energy(self, s)

    def energies(self, states) -> np.ndarray:
        h, J = self.dense()
        S = np.asarray(states, dtype=np.float64).reshape(-1, len(self.variables))
        return S @ h + np.einsum("ki,ij,kj->k", S, J, S)

    def max_abs_coefficient(self) -> float:
        vals = [abs(v) for v in self.h.values()] + [abs(v) for v in self.J.values()]
        return max(vals, default=0.0)

    def to_json(self) -> str:
        doc = {
            "variables": list(self.variables),
            "labels": self.labels,
            "h": {str(k): v for k, v in sorted(self.h.items())},
            "J": [[i, j, v] for (i, j), v in sorted(self.J.items())],
            "offset": self.offset,
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "IsingModel":
        doc = json.loads(text)
        return cls(
            h={int(k): float(v) for k, v in doc.get("h", {}).items()},
            J={(int(i), int(j)): float(v) for i, j, v in doc.get("J", [])},
            offset=float(doc.get("offset", 0.0)),
            variables=tuple(doc.get("variables", ())),
            labels=doc.get("labels"),
        )


def ising_from_matrix(M, labels: Sequence[str] | None = None) -> IsingModel:
    """Read a square matrix as Ising coefficients: diagonal -> h, rest -> J."""
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    h = {i: float(M[i, i]) for i in range(n)}
    J = {}
    for i in range(n):
        for j in range(i + 1, n):
            v = M[i, j] + M[j, i]
            if v != 0.0:
                J[(i, j)] = v
    return IsingModel(h, J, 0.0, tuple(range(n)), list(labels) if labels else None)


def qubo_to_ising(model: QuboModel) -> IsingModel:
    """Substitute ``x = (s + 1) / 2`` into ``x^T Q x``."""
    U = model.canonical()
    n = model.N
    h = {i: 0.0 for i in range(n)}
    J = {}
    offset = 0.0
    for i in range(n):
        q = U[i, i]
        h[i] += 0.5 * q
        offset += 0.5 * q
    rows, cols = np.nonzero(np.triu(U, 1))
    for i, j in zip(rows.tolist(), cols.tolist()):
        q = U[i, j]
        J[(i, j)] = J.get((i, j), 0.0) + 0.25 * q
        h[i] += 0.25 * q
        h[j] += 0.25 * q
        offset += 0.25 * q
    return IsingModel(h, J, offset, tuple(range(n)), list(model.labels))


def ising_energy(model: IsingModel, s) -> float:
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (model.num_variables,):
        raise ValueError(f"state must have length {model.num_variables}")
    if np.any(np.abs(s) != 1):
        raise ValueError("spins must be -1 or +1")
    pos = {v: k for k, v in enumerate(model.variables)}
    e = 0.0
    for v, b in model.h.items():
        e += b * s[pos[v]]
    for (u, v), c in model.J.items():
        e += c * s[pos[u]] * s[pos[v]]
    return float(e)


def spins_to_binary(s) -> np.ndarray:
    return ((np.asarray(s) + 1) // 2).astype(np.int8)


def binary_to_spins(x) -> np.ndarray:
    return (2 * np.asarray(x) - 1).astype(np.int8)
