"""Sample sets: states with energies and occurrence counts."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

BINARY = "BINARY"
SPIN = "SPIN"


@dataclass(eq=False)
class SampleSet:
    states: np.ndarray  # (k, N) int8, 0/1 or -1/+1 per vartype
    energies: np.ndarray
    counts: np.ndarray
    vartype: str = BINARY
    variables: tuple[int, ...] = ()

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=np.int8)
        if self.states.ndim == 1:
            self.states = self.states.reshape(-1, len(self.variables))
        self.energies = np.asarray(self.energies, dtype=np.float64).ravel()
        self.counts = np.asarray(self.counts, dtype=np.int64).ravel()
        if not (len(self.states) == len(self.energies) == len(self.counts)):
            raise ValueError("states, energies and counts must have equal length")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")
        if self.vartype not in (BINARY, SPIN):
            raise ValueError(f"unknown vartype {self.vartype!r}")
        if not self.variables:
            self.variables = tuple(range(self.states.shape[1]))

    def __len__(self):
        return len(self.energies)

    def __iter__(self):
        for s, e, c in zip(self.states, self.energies, self.counts):
            yield s, float(e), int(c)

    @property
    def num_variables(self) -> int:
        return self.states.shape[1]

    def _take(self, order) -> "SampleSet":
        return SampleSet(self.states[order], self.energies[order], self.counts[order],
                         self.vartype, self.variables)

    def _state_keys(self):
        # lexsort: last key is primary; columns give the unsigned-int order
        return [self.states[:, k] for k in range(self.num_variables - 1, -1, -1)]

    def sorted_by_energy(self) -> "SampleSet":
        order = np.lexsort(self._state_keys() + [self.energies])
        return self._take(order)

    def sorted_by_count(self) -> "SampleSet":
        order = np.lexsort(self._state_keys() + [self.energies, -self.counts])
        return self._take(order)

    @property
    def first(self):
        k = int(np.lexsort(self._state_keys() + [self.energies])[0])
        return self.states[k], float(self.energies[k]), int(self.counts[k])

    def lowest(self, atol: float = 0.0) -> "SampleSet":
        """Entries whose energy is within ``atol`` of the minimum."""
        if not len(self):
            return self
        keep = self.energies <= self.energies.min() + atol
        return self._take(np.flatnonzero(keep)).sorted_by_energy()

    def bitstrings(self) -> list[str]:
        bits = self.states > 0 if self.vartype == SPIN else self.states == 1
        return ["".join("1" if b else "0" for b in row) for row in bits]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["state", "energy", "count"])
        for bits, e, c in zip(self.bitstrings(), self.energies, self.counts):
            w.writerow([bits, repr(float(e) + 0.0), int(c)])  # + 0.0 folds -0.0
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "vartype": self.vartype,
            "variables": list(self.variables),
            "samples": [
                {"state": [int(v) for v in s], "energy": float(e), "count": int(c)}
                for s, e, c in zip(self.states, self.energies, self.counts)
            ],
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "SampleSet":
        doc = json.loads(text)
        n = len(doc["variables"])
        rows = doc["samples"]
        return cls(np.array([r["state"] for r in rows], dtype=np.int8).reshape(len(rows), n),
                   [r["energy"] for r in rows], [r["count"] for r in rows],
                   doc["vartype"], tuple(doc["variables"]))

    def histogram(self, bins: int = 20) -> dict:
        """Count-weighted energy histogram, ready for plotting elsewhere."""
        if not len(self):
            return {"bin_edges": [], "counts": []}
        counts, edges = np.histogram(self.energies, bins=bins, weights=self.counts)
        return {"bin_edges": [float(e) for e in edges], "counts": [int(c) for c in counts]}

    @classmethod
    def aggregate(cls, states, energy_fn, vartype: str, variables=()) -> "SampleSet":
        """Collapse repeated rows of ``states`` into counted entries."""
        states = np.asarray(states, dtype=np.int8)
        uniq, counts = np.unique(states, axis=0, return_counts=True)
        return cls(uniq, energy_fn(uniq), counts, vartype, tuple(variables)).sorted_by_energy()
