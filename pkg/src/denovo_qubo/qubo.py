"""TSP -> QUBO construction, tour decoding, and the ``.qubo`` text format."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .reads import OverlapGraph, ReadSet


class QuboFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Penalties:
    a: float = 0.0  # assignment reward on every diagonal cell
    b: float = 13.0  # one node in several time slots
    c: float = 13.0  # one time slot holding several nodes


@dataclass(eq=False)
class QuboModel:
    Q: np.ndarray
    labels: list[str] = field(default_factory=list)
    penalties: Penalties | None = None

    def __post_init__(self):
        Q = np.array(self.Q, dtype=np.float64)
        if Q.size == 0:
            Q = Q.reshape(0, 0)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError("Q must be square")
        self.Q = Q
        if not self.labels:
            self.labels = [f"q{i}" for i in range(Q.shape[0])]
        if len(self.labels) != Q.shape[0]:
            raise ValueError("one label per variable")

    @property
    def N(self) -> int:
        return self.Q.shape[0]

    @property
    def num_variables(self) -> int:
        return self.N

    def canonical(self) -> np.ndarray:
        """Upper-triangular matrix with the same quadratic form."""
        U = np.triu(self.Q, 1) + np.tril(self.Q, -1).T
        U[np.diag_indices(self.N)] = np.diag(self.Q)
        return U

    def energy(self, x) -> float:
        return qubo_energy(self, x)

    def energies(self, states) -> np.ndarray:
        X = np.asarray(states, dtype=np.float64).reshape(-1, self.N)
        return np.einsum("ki,ij,kj->k", X, self.Q, X)

    def to_json(self) -> str:
        doc = {
            "labels": self.labels,
            "Q": self.Q.tolist(),
            "penalties": None if self.penalties is None else vars(self.penalties),
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "QuboModel":
        doc = json.loads(text)
        pen = doc.get("penalties")
        return cls(np.array(doc["Q"], dtype=np.float64).reshape(len(doc["labels"]), -1),
                   list(doc["labels"]), Penalties(**pen) if pen else None)


def tsp_labels(n: int) -> list[str]:
    return [f"n{i}t{t}" for i in range(n) for t in range(n)]


def tsp_to_qubo(graph: OverlapGraph, a: float = 0.0, b: float = 13.0, c: float = 13.0) -> QuboModel:
    """One-hot (node, time) QUBO for the directed tour over ``graph``.

    Variable ``i*n + t`` is 1 when node ``i`` is visited at time ``t``.
    Q is the sum of: ``a`` on the diagonal; ``b`` on every ordered pair of
    distinct times of one node; ``c`` on every ordered pair of distinct
    nodes at one time; ``-weights[i, j]`` from ``(i, t)`` to
    ``(j, (t + 1) % n)``, so the closing edge of the cycle is priced too.
    """
    n = graph.n
    if n < 2:
        raise ValueError("need at least 2 nodes")
    w = graph.weights
    N = n * n
    Q = np.zeros((N, N))
    Q[np.diag_indices(N)] += a
    off = 1.0 - np.eye(n)
    eye = np.eye(n)
    # node-major indexing: kron(node block, time block)
    Q += b * np.kron(eye, off)
    Q += c * np.kron(off, eye)
    shift = np.roll(eye, 1, axis=1)  # shift[t, (t+1) % n] = 1
    Q += np.kron(-w, shift)
    return QuboModel(Q, tsp_labels(n), Penalties(a, b, c))


def qubo_energy(model: QuboModel, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.N,):
        raise ValueError(f"state must have length {model.N}")
    if np.any((x != 0) & (x != 1)):
        raise ValueError("QUBO states are 0/1 vectors")
    return float(x @ model.Q @ x)


def encode_tour(tour: Sequence[int]) -> np.ndarray:
    n = len(tour)
    x = np.zeros(n * n, dtype=np.int8)
    for t, node in enumerate(tour):
        x[int(node) * n + t] = 1
    return x


@dataclass(frozen=True)
class Decoding:
    """Outcome of reading a tour off a 0/1 state.

    ``tour`` is set only when every time slot holds exactly one node and
    every node sits in exactly one slot; otherwise the four index lists say
    which constraint class failed.
    """

    tour: tuple[int, ...] | None
    empty_slots: tuple[int, ...] = ()
    crowded_slots: tuple[int, ...] = ()
    unvisited_nodes: tuple[int, ...] = ()
    repeated_nodes: tuple[int, ...] = ()

    @property
    def valid(self) -> bool:
        return self.tour is not None

    @property
    def violations(self) -> list[str]:
        names = []
        if self.empty_slots:
            names.append("empty_slot")
        if self.crowded_slots:
            names.append("slot_with_multiple_nodes")
        if self.unvisited_nodes:
            names.append("unvisited_node")
        if self.repeated_nodes:
            names.append("node_in_multiple_slots")
        return names

    @property
    def classification(self) -> str:
        return "valid" if self.valid else "+".join(self.violations)


def decode_solution(model_or_n, x) -> Decoding:
    n = model_or_n if isinstance(model_or_n, int) else int(round(np.sqrt(model_or_n.N)))
    x = np.asarray(x).astype(np.int64).ravel()
    if x.shape[0] != n * n:
        raise ValueError(f"state must have length {n * n}")
    if np.any((x != 0) & (x != 1)):
        raise ValueError("decode expects a 0/1 state")
    grid = x.reshape(n, n)  # [node, time]
    per_slot = grid.sum(axis=0)
    per_node = grid.sum(axis=1)
    dec = Decoding(
        tour=None,
        empty_slots=tuple(int(t) for t in np.flatnonzero(per_slot == 0)),
        crowded_slots=tuple(int(t) for t in np.flatnonzero(per_slot > 1)),
        unvisited_nodes=tuple(int(i) for i in np.flatnonzero(per_node == 0)),
        repeated_nodes=tuple(int(i) for i in np.flatnonzero(per_node > 1)),
    )
    if dec.violations:
        return dec
    return Decoding(tour=tuple(int(np.flatnonzero(grid[:, t])[0]) for t in range(n)))


def assemble_sequence(reads: ReadSet | Sequence[str], tour: Sequence[int], overlaps) -> tuple[str, int]:
    """Stitch reads along ``tour``; returns ``(sequence, closing_overlap)``.

    Each successive read contributes only the part after its overlap with
    the previous one. The overlap from the last read back to the first is
    not applied and is returned as the second element.
    """
    reads = list(reads)
    tour = [int(t) for t in tour]
    if len(reads) < 2:
        raise ValueError("need at least 2 reads")
    if sorted(tour) != list(range(len(reads))):
        raise ValueError("tour must be a permutation of the reads")
    O = np.asarray(overlaps)
    seq = reads[tour[0]]
    for prev, cur in zip(tour, tour[1:]):
        seq += reads[cur][int(O[prev, cur]):]
    return seq, int(O[tour[-1], tour[0]])


# .qubo text format

def _fmt(v: float) -> str:
    # shortest decimal that parses back to the same double
    return repr(float(v))


def write_qubo_file(model: QuboModel, comments: Sequence[str] = ()) -> str:
    """Serialize to ``.qubo`` text (upper-triangular, nonzero entries only)."""
    U = model.canonical()
    if not np.all(np.isfinite(U)):
        raise ValueError("model has non-finite coefficients")
    diag = [(i, U[i, i]) for i in range(model.N) if U[i, i] != 0]
    rows, cols = np.nonzero(np.triu(U, 1))
    lines = [f"c {c}" for c in comments]
    lines.append(f"p qubo 0 {model.N} {len(diag)} {len(rows)}")
    lines += [f"q{i} q{i} {_fmt(v)}" for i, v in diag]
    lines += [f"q{i} q{j} {_fmt(U[i, j])}" for i, j in zip(rows, cols)]
    return "\n".join(lines) + "\n"


def _index(token: str, lineno: int) -> int:
    t = token[1:] if token[:1] in ("q", "Q") else token
    if not t.isdigit():
        raise QuboFormatError(f"line {lineno}: bad variable name {token!r}")
    return int(t)


def read_qubo_file(text: str) -> QuboModel:
    header = None
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if header is not None:
                raise QuboFormatError(f"line {lineno}: second header")
            if len(parts) != 6 or parts[1] != "qubo" or not all(p.isdigit() for p in parts[2:]):
                raise QuboFormatError(f"line {lineno}: expected 'p qubo 0 <nodes> <ndiag> <ncouplers>'")
            header = [int(p) for p in parts[2:]]
            continue
        if header is None:
            raise QuboFormatError(f"line {lineno}: entry before the 'p qubo' header")
        if len(parts) != 3:
            raise QuboFormatError(f"line {lineno}: expected '<u> <v> <value>'")
        i, j = _index(parts[0], lineno), _index(parts[1], lineno)
        try:
            value = float(parts[2])
        except ValueError:
            raise QuboFormatError(f"line {lineno}: non-numeric value {parts[2]!r}") from None
        if not np.isfinite(value):
            raise QuboFormatError(f"line {lineno}: non-finite value {parts[2]!r}")
        entries.append((lineno, i, j, value))
    if header is None:
        raise QuboFormatError("missing 'p qubo' header")
    _, nodes, ndiag, ncoup = header
    n_diag_seen = sum(1 for _, i, j, _ in entries if i == j)
    if n_diag_seen != ndiag or len(entries) - n_diag_seen != ncoup:
        raise QuboFormatError(
            f"header announces {ndiag} diagonal and {ncoup} coupler lines, "
            f"found {n_diag_seen} and {len(entries) - n_diag_seen}")
    size = max([nodes] + [max(i, j) + 1 for _, i, j, _ in entries])
    Q = np.zeros((size, size))
    for lineno, i, j, value in entries:
        if i > j:
            i, j = j, i
        Q[i, j] += value
    return QuboModel(Q)
