"""Reads, suffix-prefix overlaps, and the overlap (TSP) graph."""
from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

ALPHABET = frozenset("ACGT")


class ReadFormatError(ValueError):
    """Bad read input (alphabet, duplicates, empty records)."""


@dataclass(frozen=True)
class ReadSet:
    reads: tuple[str, ...]

    def __post_init__(self):
        reads = tuple(self.reads)
        object.__setattr__(self, "reads", reads)
        for k, r in enumerate(reads):
            if not r:
                raise ReadFormatError(f"read {k} is empty")
            bad = set(r) - ALPHABET
            if bad:
                raise ReadFormatError(f"read {k} has characters outside ACGT: {''.join(sorted(bad))}")
        if len(set(reads)) != len(reads):
            raise ReadFormatError("duplicate reads; remove them before building the overlap graph")

    def __len__(self):
        return len(self.reads)

    def __getitem__(self, k):
        return self.reads[k]

    def __iter__(self):
        return iter(self.reads)

    @classmethod
    def from_text(cls, text: str, dedupe: bool = False) -> "ReadSet":
        """Parse one-read-per-line text or minimal FASTA.

        FASTA headers (``>``) separate records; sequence lines of one record
        are joined. Blank lines are ignored, case is folded to upper.
        """
        records: list[str] = []
        fasta = False
        current: list[str] = []
        for raw in io.StringIO(text):
            line = raw.strip()
            if not line:
                continue
            if line.startswith(">"):
                fasta = True
                if current:
                    records.append("".join(current))
                current = []
                continue
            if fasta:
                current.append(line.upper())
            else:
                records.append(line.upper())
        if current:
            records.append("".join(current))
        if dedupe:
            records = list(dict.fromkeys(records))
        return cls(tuple(records))

    @classmethod
    def from_file(cls, path: str | Path, dedupe: bool = False) -> "ReadSet":
        return cls.from_text(Path(path).read_text(), dedupe=dedupe)


def align(read1: str, read2: str, max_mismatch: int = 0) -> int:
    """Longest suffix of ``read1`` matching a prefix of ``read2``.

    A candidate overlap qualifies when it has at most ``max_mismatch``
    mismatching positions. Candidates are tried from the longest
    (``min(len1, len2)``) down, so the first hit is returned; 0 means no
    overlap of length >= 1 qualifies.
    """
    if max_mismatch < 0:
        raise ValueError("max_mismatch must be >= 0")
    if not read1 or not read2:
        raise ValueError("reads must be nonempty")
    l1 = len(read1)
    l2 = len(read2)
    for shift in range(max(l1 - l2, 0), l1):
        mismatches = 0
        for r1i in range(shift, l1):
            if read1[r1i] != read2[r1i - shift]:
                mismatches += 1
                if mismatches > max_mismatch:
                    break
        if mismatches <= max_mismatch:
            return l1 - shift
    return 0


@dataclass(frozen=True, eq=False)
class OverlapGraph:
    """Directed overlap weights; ``weights[i, j]`` scores read i followed by j.

    ``overlaps`` always holds the raw integer overlaps; ``weights`` is either
    the same matrix or its Frobenius-normalized copy.
    """

    weights: np.ndarray
    normalized: bool = False
    overlaps: np.ndarray | None = None

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weights must be a square matrix")
        if np.any(np.diag(w) != 0):
            raise ValueError("overlap graph must have a zero diagonal")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.overlaps is not None:
            o = np.array(self.overlaps, dtype=np.int64)
            o.setflags(write=False)
            object.__setattr__(self, "overlaps", o)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def raw(self) -> "OverlapGraph":
        if not self.normalized:
            return self
        if self.overlaps is None:
            raise ValueError("raw overlaps were not kept for this graph")
        return OverlapGraph(self.overlaps.astype(np.float64), False, self.overlaps)

    def to_csv(self) -> str:
        lines = [",".join(format(v, ".12g") for v in row) for row in self.weights]
        return "\n".join(lines) + "\n"


def overlap_matrix(reads: Sequence[str], max_mismatch: int = 0) -> np.ndarray:
    n = len(reads)
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i != j:
                out[i, j] = align(reads[i], reads[j], max_mismatch)
    return out


def reads_to_tsp(reads: ReadSet | Sequence[str], max_mismatch: int = 0, normalize: bool = True) -> OverlapGraph:
    """Pairwise overlap graph of ``reads``.

    With ``normalize`` the matrix is divided by its Frobenius norm, which is
    undefined (and rejected) when no pair overlaps.
    """
    if not isinstance(reads, ReadSet):
        reads = ReadSet(tuple(reads))
    if len(reads) < 2:
        raise ValueError("need at least 2 reads")
    raw = overlap_matrix(reads.reads, max_mismatch)
    if not normalize:
        return OverlapGraph(raw.astype(np.float64), False, raw)
    if not raw.any():
        raise ValueError("no read pair overlaps; cannot normalize an all-zero matrix")
    return OverlapGraph(raw / np.linalg.norm(raw), True, raw)


def tour_cost(graph: OverlapGraph, tour: Sequence[int]) -> float:
    """Cyclic tour cost, each edge contributing the negated weight."""
    tour = [int(t) for t in tour]
    if graph.n < 2:
        raise ValueError("tours need at least 2 nodes")
    if sorted(tour) != list(range(graph.n)):
        raise ValueError(f"{tour} is not a permutation of 0..{graph.n - 1}")
    return -float(sum(graph.weights[a, b] for a, b in zip(tour, tour[1:] + tour[:1])))
