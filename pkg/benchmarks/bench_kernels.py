"""Time each hot kernel through its numba body and its numpy body.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Both bodies are called directly, so the env flag does not matter here.
The first numba call (compilation) is excluded.
"""
import argparse
import json
import time

import numpy as np

from denovo_qubo import _accel, kernels
from denovo_qubo.circuit import compile_ansatz, gate_matrix
from denovo_qubo.hamiltonian import build_cost_hamiltonian
from denovo_qubo.ising import qubo_to_ising
from denovo_qubo.qubo import tsp_to_qubo
from denovo_qubo.reads import reads_to_tsp

READS = ["ATGGCGTGCA", "GCGTGCAATG", "TGCAATGGCG", "AATGGCGTGC"]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases():
    graph = reads_to_tsp(READS, normalize=False)
    qubo = tsp_to_qubo(graph)
    U = qubo.canonical()
    linear, quad = np.diag(U).copy(), np.triu(U, 1)
    rows, cols = np.nonzero(quad)
    vals = quad[rows, cols].copy()
    rows, cols = rows.astype(np.int64), cols.astype(np.int64)

    def enum(body):
        return lambda: body(linear, rows, cols, vals, False, 0, 1 << 16)

    h, J = qubo_to_ising(qubo).dense()
    C = J + J.T
    rng = np.random.default_rng(0)
    reads, sweeps = 200, 200
    spins0 = rng.choice([-1.0, 1.0], size=(reads, 16))
    betas = np.geomspace(0.01, 1.5, sweeps)
    thr = rng.standard_exponential((reads, sweeps, 16))

    def metro(body):
        def run():
            s = spins0.copy()
            body(C, s, h + s @ C, betas, thr)
        return run

    H = build_cost_hamiltonian(graph)
    masks = np.array([sum(1 << q for q in s) for s in H.terms], dtype=np.int64)
    coeffs = np.array(list(H.terms.values()))

    def zdiag(body):
        return lambda: body(masks, coeffs, 16)

    gates = compile_ansatz(H, 1).bind([0.3, 0.7])
    mats = [None if g.name == "CNOT" else gate_matrix(g) for g in gates]

    def circuit(one, cnot):
        def run():
            psi = np.zeros(1 << 16, complex)
            psi[0] = 1
            for g, m in zip(gates, mats):
                if m is None:
                    cnot(psi, *g.qubits)
                else:
                    one(psi, g.qubits[0], m[0, 0], m[0, 1], m[1, 0], m[1, 1])
        return run

    return {
        "enumerate 2^16 QUBO energies": (enum(kernels._enum_energies_jit), enum(kernels._enum_energies_np)),
        f"metropolis {reads} reads x {sweeps} sweeps, N=16": (metro(kernels._metropolis_jit),
                                                               metro(kernels._metropolis_np)),
        f"H_C diagonal, 16 qubits, {len(masks)} terms": (zdiag(kernels._z_diagonal_jit),
                                                         zdiag(kernels._z_diagonal_np)),
        f"QAOA p=1 circuit, 16 qubits, {len(gates)} gates": (
            circuit(kernels._apply_1q_jit, kernels._apply_cnot_jit),
            circuit(kernels._apply_1q_np, kernels._apply_cnot_np)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write results here")
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is unavailable or disabled; nothing to compare")
    rows = []
    for name, (jit, np_body) in cases().items():
        jit()  # compile / load from cache
        t_jit, t_np = best_of(jit, args.repeat), best_of(np_body, args.repeat)
        rows.append({"kernel": name, "numba_s": t_jit, "numpy_s": t_np, "speedup": t_np / t_jit})
    width = max(len(r["kernel"]) for r in rows)
    print(f"{'kernel':<{width}}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for r in rows:
        print(f"{r['kernel']:<{width}}  {r['numba_s']:10.4f}  {r['numpy_s']:10.4f}  {r['speedup']:7.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
