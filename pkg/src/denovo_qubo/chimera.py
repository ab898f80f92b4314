"""Chimera topology, minor embedding, chain couplings and majority-vote unembedding."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .ising import IsingModel
from .sampleset import SPIN, SampleSet


@dataclass(frozen=True)
class ChimeraGraph:
    """``rows x cols`` grid of ``K_{t,t}`` cells.

    Qubit ``((i * cols + j) * 2 + u) * t + k`` sits in cell ``(i, j)``, shore
    ``u`` (0 vertical, 1 horizontal), position ``k``. Shore-0 qubits couple
    to the cell below, shore-1 qubits to the cell to the right.
    """

    rows: int
    cols: int
    t: int = 4

    def __post_init__(self):
        if min(self.rows, self.cols, self.t) < 1:
            raise ValueError("rows, cols and t must be >= 1")

    @property
    def num_qubits(self) -> int:
        return self.rows * self.cols * 2 * self.t

    def index(self, i: int, j: int, u: int, k: int) -> int:
        return ((i * self.cols + j) * 2 + u) * self.t + k

    def coordinates(self, q: int) -> tuple[int, int, int, int]:
        k = q % self.t
        q //= self.t
        u = q % 2
        q //= 2
        return q // self.cols, q % self.cols, u, k

    @cached_property
    def edges(self) -> frozenset[tuple[int, int]]:
        out = set()
        t = self.t
        for i in range(self.rows):
            for j in range(self.cols):
                for k in range(t):
                    for k2 in range(t):
                        out.add((self.index(i, j, 0, k), self.index(i, j, 1, k2)))
                    if i + 1 < self.rows:
                        out.add((self.index(i, j, 0, k), self.index(i + 1, j, 0, k)))
                    if j + 1 < self.cols:
                        out.add((self.index(i, j, 1, k), self.index(i, j + 1, 1, k)))
        return frozenset((min(a, b), max(a, b)) for a, b in out)

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {q: set() for q in range(self.num_qubits)}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return {q: frozenset(v) for q, v in adj.items()}

    def csr(self) -> sparse.csr_matrix:
        a = np.array(sorted(self.edges), dtype=np.int64).reshape(-1, 2)
        rows = np.concatenate([a[:, 0], a[:, 1]])
        cols = np.concatenate([a[:, 1], a[:, 0]])
        m = sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.num_qubits,) * 2)
        m.sort_indices()
        return m


def chimera_graph(m: int, n: int, t: int = 4) -> ChimeraGraph:
    return ChimeraGraph(m, n, t)


@dataclass
class Embedding:
    chains: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        self.chains = {int(v): tuple(sorted(int(q) for q in c)) for v, c in self.chains.items()}

    @property
    def max_chain_length(self) -> int:
        return max((len(c) for c in self.chains.values()), default=0)

    @property
    def num_qubits(self) -> int:
        return sum(len(c) for c in self.chains.values())

    def to_json(self) -> str:
        return json.dumps({str(v): list(c) for v, c in sorted(self.chains.items())}, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Embedding":
        return cls({int(k): tuple(v) for k, v in json.loads(text).items()})


@dataclass(frozen=True)
class EmbeddingReport:
    disjoint: bool
    connected: bool
    covers_couplings: bool
    complete: bool
    max_chain_length: int
    num_qubits: int
    problems: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.disjoint and self.connected and self.covers_couplings and self.complete

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "disjoint": self.disjoint,
            "connected": self.connected,
            "covers_couplings": self.covers_couplings,
            "complete": self.complete,
            "max_chain_length": self.max_chain_length,
            "num_qubits": self.num_qubits,
            "problems": list(self.problems),
        }


def _chain_connected(chain, adjacency) -> bool:
    if not chain:
        return False
    members = set(chain)
    seen = {chain[0]}
    todo = deque([chain[0]])
    while todo:
        q = todo.popleft()
        for r in adjacency[q]:
            if r in members and r not in seen:
                seen.add(r)
                todo.append(r)
    return len(seen) == len(members)


def verify_embedding(graph: ChimeraGraph, embedding: Embedding,
                     couplings: Iterable[tuple[int, int]], variables: Iterable[int] = ()) -> EmbeddingReport:
    couplings = [(int(u), int(v)) for u, v in couplings]
    needed = set(int(v) for v in variables)
    for u, v in couplings:
        needed.update((u, v))
    chains = embedding.chains
    adjacency = graph.adjacency
    problems = []

    complete = True
    for v in sorted(needed):
        if not chains.get(v):
            complete = False
            problems.append(f"variable {v} has no chain")
    for v, c in chains.items():
        bad = [q for q in c if not 0 <= q < graph.num_qubits]
        if bad:
            complete = False
            problems.append(f"chain {v} uses qubits outside the graph: {bad}")

    owner: dict[int, int] = {}
    disjoint = True
    for v, c in sorted(chains.items()):
        for q in c:
            if q in owner:
                disjoint = False
                problems.append(f"qubit {q} shared by chains {owner[q]} and {v}")
            else:
                owner[q] = v

    connected = True
    if complete:
        for v, c in sorted(chains.items()):
            if not _chain_connected(c, adjacency):
                connected = False
                problems.append(f"chain {v} is not connected")
    else:
        connected = all(_chain_connected(c, adjacency) for c in chains.values()
                        if c and all(0 <= q < graph.num_qubits for q in c))

    covers = True
    for u, v in couplings:
        cu, cv = chains.get(u, ()), set(chains.get(v, ()))
        if not any(r in cv for q in cu if 0 <= q < graph.num_qubits for r in adjacency[q]):
            covers = False
            problems.append(f"no physical edge between chains {u} and {v}")

    return EmbeddingReport(disjoint, connected, covers, complete,
                           embedding.max_chain_length, embedding.num_qubits, tuple(problems))


def find_embedding(couplings: Iterable[tuple[int, int]], graph: ChimeraGraph, seed: int = 0,
                   max_tries: int = 10, variables: Iterable[int] = (), rounds: int = 30,
                   patience: int = 6, clique_fallback: bool = True) -> Embedding | None:
    """Randomized shortest-path minor embedding; ``None`` when nothing valid turns up.

    Each try places variables in a random order, rooting each chain at the
    qubit with the cheapest combined path to the chains of its already
    placed neighbours and keeping those paths as the chain. Qubits held by
    other chains cost ``num_qubits ** uses``, so early passes may overlap;
    later passes tear chains up one at a time and reroute until no qubit is
    shared, giving up on a try after ``patience`` passes without progress.

    Dense problems tend to jam this search. If every try fails and the
    variables fit, a clique-shaped layout (one L-shaped chain per variable,
    slots shuffled by ``seed``, unneeded chain ends trimmed) is used instead.
    Only embeddings that pass :func:`verify_embedding` are returned.
    """
    couplings = sorted({(min(int(u), int(v)), max(int(u), int(v))) for u, v in couplings if u != v})
    nodes = set(int(v) for v in variables)
    nbrs: dict[int, set[int]] = {}
    for u, v in couplings:
        nodes.update((u, v))
        nbrs.setdefault(u, set()).add(v)
        nbrs.setdefault(v, set()).add(u)
    nodes = sorted(nodes)
    if not nodes:
        return Embedding({})
    if len(nodes) > graph.num_qubits:
        return None
    base = graph.csr()
    nq = graph.num_qubits
    penalty_base = float(max(nq, 2))
    rng = np.random.default_rng(seed)

    for _ in range(max_tries):
        chains: dict[int, list[int]] = {}
        usage = np.zeros(nq, dtype=np.int64)
        best, stale = None, 0
        for _round in range(rounds):
            for v in rng.permutation(nodes):
                v = int(v)
                for q in chains.pop(v, ()):
                    usage[q] -= 1
                chain = _place(v, nbrs.get(v, ()), chains, usage, base, penalty_base, rng)
                if chain is None:
                    break
                chains[v] = chain
                for q in chain:
                    usage[q] += 1
            else:
                shared = int(np.count_nonzero(usage > 1))
                if shared == 0:
                    emb = Embedding({v: tuple(c) for v, c in chains.items()})
                    if verify_embedding(graph, emb, couplings, nodes).ok:
                        return emb
                if best is None or shared < best:
                    best, stale = shared, 0
                else:
                    stale += 1
                    if stale >= patience:
                        break
                continue
            break

    if clique_fallback:
        emb = clique_embedding(nodes, graph, couplings, seed=seed)
        if emb is not None and verify_embedding(graph, emb, couplings, nodes).ok:
            return emb
    return None


def _place(v, neighbours, chains, usage, base, penalty_base, rng):
    weight = penalty_base ** usage.astype(np.float64)
    placed = [u for u in neighbours if u in chains]
    if not placed:
        cheapest = np.flatnonzero(weight == weight.min())
        return [int(rng.choice(cheapest))]
    g = base.copy()
    g.data = weight[g.indices]
    total = weight.copy()
    paths = []
    for u in placed:
        dist, pred, _ = csgraph.dijkstra(g, directed=True, indices=chains[u], min_only=True,
                                         return_predecessors=True)
        # cost of the path's interior; the root's own weight is counted once
        total += np.maximum(dist - weight, 0.0)
        paths.append((set(chains[u]), pred))
    total = total + rng.random(total.shape[0]) * 1e-6  # random tie-break
    root = int(np.argmin(total))
    if not np.isfinite(total[root]):
        return None
    chain = {root}
    for members, pred in paths:
        q = root
        while q not in members:
            chain.add(q)
            q = int(pred[q])
            if q < 0:
                return None
    return sorted(chain)


def clique_embedding(variables: Iterable[int], graph: ChimeraGraph,
                     couplings: Iterable[tuple[int, int]] = (), seed: int | None = None) -> Embedding | None:
    """Embedding that would host every pair of ``variables`` as a coupling.

    Slot ``(b, k)`` owns the shore-1 qubits of row ``b`` in columns ``0..b``
    and the shore-0 qubits of column ``b`` in rows ``b..s-1``, position
    ``k``, inside the top-left ``s x s`` block (``s = ceil(len / t)``). Any
    two slots meet in one cell. With ``couplings`` given, chain ends that
    touch no required neighbour are trimmed. Returns ``None`` if the
    variables do not fit.
    """
    variables = sorted(set(int(v) for v in variables))
    t = graph.t
    s = max(1, -(-len(variables) // t))
    if s > min(graph.rows, graph.cols):
        return None
    slots = [(b, k) for b in range(s) for k in range(t)]
    if seed is not None:
        order = np.random.default_rng(seed).permutation(len(slots))
        slots = [slots[i] for i in order]
    chains = {}
    for v, (b, k) in zip(variables, slots):
        chain = [graph.index(b, j, 1, k) for j in range(b + 1)]
        chain += [graph.index(i, b, 0, k) for i in range(b, s)]
        chains[v] = chain
    couplings = [(int(u), int(v)) for u, v in couplings]
    if couplings:
        chains = _trim_chains(chains, couplings, graph.adjacency)
    return Embedding(chains)


def _trim_chains(chains, couplings, adjacency):
    nbrs: dict[int, set[int]] = {v: set() for v in chains}
    for u, v in couplings:
        nbrs[u].add(v)
        nbrs[v].add(u)
    chains = {v: set(c) for v, c in chains.items()}

    def touches(members, other):
        return any(r in other for q in members for r in adjacency[q])

    changed = True
    while changed:
        changed = False
        for v in sorted(chains):
            for q in sorted(chains[v]):
                chain = chains[v]
                if len(chain) == 1 or sum(1 for r in adjacency[q] if r in chain) != 1:
                    continue
                rest = chain - {q}
                if all(touches(rest, chains[u]) for u in nbrs[v]):
                    chains[v] = rest
                    changed = True
    return {v: tuple(sorted(c)) for v, c in chains.items()}


def embed_ising(model: IsingModel, embedding: Embedding, graph: ChimeraGraph,
                chain_strength: float | None = None) -> IsingModel:
    """Physical model over the qubits of ``embedding``.

    Biases are split evenly along each chain; each logical coupling sits on
    the lowest-index physical edge between the two chains; every edge inside
    a chain gets ``-chain_strength``.
    """
    if chain_strength is None:
        chain_strength = default_chain_strength(model)
    chains = embedding.chains
    adjacency = graph.adjacency
    h: dict[int, float] = {}
    J: dict[tuple[int, int], float] = {}
    for v in model.variables:
        if v not in chains or not chains[v]:
            raise ValueError(f"variable {v} has no chain")
        share = model.h.get(v, 0.0) / len(chains[v])
        for q in chains[v]:
            h[q] = h.get(q, 0.0) + share
    for (u, v), c in model.J.items():
        cv = set(chains[v])
        edges = sorted((min(a, b), max(a, b)) for a in chains[u] for b in adjacency[a] if b in cv)
        if not edges:
            raise ValueError(f"no physical edge between chains {u} and {v}")
        key = edges[0]
        J[key] = J.get(key, 0.0) + c
    for v in model.variables:
        members = set(chains[v])
        for a in chains[v]:
            for b in adjacency[a]:
                if b in members and a < b:
                    J[(a, b)] = J.get((a, b), 0.0) - chain_strength
    qubits = tuple(sorted(q for v in model.variables for q in chains[v]))
    return IsingModel(h, J, model.offset, qubits)


def default_chain_strength(model: IsingModel) -> float:
    js = [abs(v) for v in model.J.values()]
    if js:
        return 2.0 * max(js)
    return 2.0 * max((abs(v) for v in model.h.values()), default=0.5)


def unembed_majority(samples: SampleSet, embedding: Embedding, model: IsingModel) -> SampleSet:
    """Logical spins by chain majority; a tied chain reads as +1."""
    if samples.vartype != SPIN:
        raise ValueError("unembedding expects spin samples")
    col = {q: k for k, q in enumerate(samples.variables)}
    logical = np.empty((len(samples), model.num_variables), dtype=np.int8)
    for k, v in enumerate(model.variables):
        idx = [col[q] for q in embedding.chains[v]]
        total = samples.states[:, idx].astype(np.int64).sum(axis=1)
        logical[:, k] = np.where(total >= 0, 1, -1)
    uniq, inverse = np.unique(logical, axis=0, return_inverse=True)
    counts = np.bincount(inverse.ravel(), weights=samples.counts, minlength=len(uniq)).astype(np.int64)
    out = SampleSet(uniq, model.energies(uniq), counts, SPIN, model.variables)
    return out.sorted_by_energy()
