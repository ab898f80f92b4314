"""De novo assembly of short reads as a QUBO / Ising / QAOA problem."""
from .chimera import (ChimeraGraph, Embedding, EmbeddingReport, chimera_graph, clique_embedding,
                      embed_ising, find_embedding, unembed_majority, verify_embedding)
from .circuit import Gate, compile_ansatz, hamiltonian_expectation, simulate
from .hamiltonian import PauliHamiltonian, build_cost_hamiltonian
from .ising import IsingModel, ising_energy, qubo_to_ising
from .neldermead import nelder_mead
from .qaoa import QaoaConfig, QaoaResult, run_qaoa
from .qubo import (Penalties, QuboModel, decode_solution, read_qubo_file, tsp_to_qubo,
                   write_qubo_file, qubo_energy)
from .reads import OverlapGraph, ReadSet, align, overlap_matrix, reads_to_tsp
from .samplers import AnnealSchedule, TooLargeError, solve_exact, solve_sa
from .sampleset import SampleSet

__version__ = "0.1.0"

__all__ = [
    "AnnealSchedule", "ChimeraGraph", "Embedding", "EmbeddingReport", "Gate", "IsingModel",
    "OverlapGraph", "PauliHamiltonian", "Penalties", "QaoaConfig", "QaoaResult", "QuboModel",
    "ReadSet", "SampleSet", "TooLargeError", "align", "build_cost_hamiltonian", "chimera_graph",
    "clique_embedding", "compile_ansatz", "decode_solution", "embed_ising", "find_embedding",
    "hamiltonian_expectation", "ising_energy", "nelder_mead", "overlap_matrix", "qubo_energy",
    "qubo_to_ising", "read_qubo_file", "reads_to_tsp", "run_qaoa", "simulate", "solve_exact",
    "data_path", "solve_sa", "tsp_to_qubo", "unembed_majority", "verify_embedding",
    "write_qubo_file",
]


def data_path(name: str):
    """Path to a bundled example file (reads, .qubo, embeddings)."""
    from importlib.resources import files
    return files(__name__) / "data" / name
