"""Hot loops: exhaustive energies, Metropolis sweeps, statevector gates.

Every kernel has a numba body (``_*_jit``) and a numpy body (``_*_np``).
The public wrappers dispatch on :data:`denovo_qubo._accel.USE_JIT`; the
benchmark and the cross-check tests call both bodies directly.

Bit conventions:

* enumeration index: variable 0 is the most significant bit, so sorting by
  index equals sorting the printed bitstring as an unsigned integer;
* statevector index: qubit ``q`` is bit ``q`` (qubit 0 least significant).
"""
import numpy as np

from . import _accel
from ._accel import njit

ENUM_CHUNK = 1 << 16


# exhaustive enumeration

@njit(cache=True)
def _enum_energies_jit(linear, rows, cols, vals, spin, start, count):
    n = linear.shape[0]
    out = np.empty(count, dtype=np.float64)
    v = np.empty(n, dtype=np.float64)
    for k in range(count):
        idx = start + k
        for i in range(n):
            bit = (idx >> (n - 1 - i)) & 1
            if spin:
                v[i] = 2.0 * bit - 1.0
            else:
                v[i] = float(bit)
        e = 0.0
        for i in range(n):
            e += linear[i] * v[i]
        for p in range(vals.shape[0]):
            e += vals[p] * v[rows[p]] * v[cols[p]]
        out[k] = e
    return out


def _enum_energies_np(linear, rows, cols, vals, spin, start, count):
    n = linear.shape[0]
    idx = np.arange(start, start + count, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    v = ((idx[:, None] >> shifts[None, :]) & 1).astype(np.float64)
    if spin:
        v = 2.0 * v - 1.0
    e = v @ linear
    if vals.shape[0]:
        e = e + (v[:, rows] * v[:, cols]) @ vals
    return e


def enumerate_energies(linear, quad, spin):
    """Energy of every one of the ``2**N`` states, indexed as described above.

    ``quad`` is a dense strictly-upper-triangular coupling matrix.
    """
    linear = np.ascontiguousarray(linear, dtype=np.float64)
    n = linear.shape[0]
    rows, cols = np.nonzero(np.triu(quad, 1))
    vals = np.ascontiguousarray(quad[rows, cols], dtype=np.float64)
    rows = rows.astype(np.int64)
    cols = cols.astype(np.int64)
    total = 1 << n
    body = _enum_energies_jit if _accel.USE_JIT else _enum_energies_np
    out = np.empty(total, dtype=np.float64)
    for start in range(0, total, ENUM_CHUNK):
        count = min(ENUM_CHUNK, total - start)
        out[start:start + count] = body(linear, rows, cols, vals, bool(spin), start, count)
    return out


# single-flip Metropolis over spins

@njit(cache=True)
def _metropolis_jit(coupling, spins, fields, betas, thresholds):
    reads, n = spins.shape
    for r in range(reads):
        for k in range(betas.shape[0]):
            beta = betas[k]
            for i in range(n):
                de = -2.0 * spins[r, i] * fields[r, i]
                if de <= 0.0 or beta * de < thresholds[r, k, i]:
                    s = -spins[r, i]
                    spins[r, i] = s
                    two_s = 2.0 * s
                    for j in range(n):
                        fields[r, j] += two_s * coupling[i, j]


def _metropolis_np(coupling, spins, fields, betas, thresholds):
    n = spins.shape[1]
    for k in range(betas.shape[0]):
        beta = betas[k]
        for i in range(n):
            de = -2.0 * spins[:, i] * fields[:, i]
            flip = (de <= 0.0) | (beta * de < thresholds[:, k, i])
            if not flip.any():
                continue
            rows = np.flatnonzero(flip)
            spins[rows, i] = -spins[rows, i]
            fields[rows] += (2.0 * spins[rows, i])[:, None] * coupling[i][None, :]


def metropolis_sweeps(coupling, spins, fields, betas, thresholds):
    """Run ``len(betas)`` sweeps in place.

    ``coupling`` is symmetric with zero diagonal, ``fields`` holds
    ``h + spins @ coupling`` on entry and is kept current. A flip with
    energy change ``dE > 0`` is accepted when ``beta * dE`` is below the
    matching entry of ``thresholds`` (standard exponential draws, i.e.
    ``-log(u)``), which is the Metropolis rule without calling ``exp``.
    """
    body = _metropolis_jit if _accel.USE_JIT else _metropolis_np
    body(coupling, spins, fields, betas, thresholds)


# statevector gates

@njit(cache=True)
def _apply_1q_jit(psi, q, m00, m01, m10, m11):
    step = 1 << q
    size = psi.shape[0]
    for base in range(0, size, 2 * step):
        for off in range(step):
            i0 = base + off
            i1 = i0 + step
            a0 = psi[i0]
            a1 = psi[i1]
            psi[i0] = m00 * a0 + m01 * a1
            psi[i1] = m10 * a0 + m11 * a1


def _apply_1q_np(psi, q, m00, m01, m10, m11):
    view = psi.reshape(-1, 2, 1 << q)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = m00 * a0 + m01 * a1
    view[:, 1, :] = m10 * a0 + m11 * a1


@njit(cache=True)
def _apply_cnot_jit(psi, control, target):
    cbit = 1 << control
    tbit = 1 << target
    for i in range(psi.shape[0]):
        if (i & cbit) and not (i & tbit):
            j = i | tbit
            tmp = psi[i]
            psi[i] = psi[j]
            psi[j] = tmp


def _apply_cnot_np(psi, control, target):
    idx = np.arange(psi.shape[0])
    sel = idx[((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)]
    partner = sel | (1 << target)
    psi[sel], psi[partner] = psi[partner], psi[sel].copy()


def apply_1q(psi, q, matrix):
    """Apply a 2x2 ``matrix`` to qubit ``q`` in place."""
    m = np.asarray(matrix, dtype=np.complex128)
    body = _apply_1q_jit if _accel.USE_JIT else _apply_1q_np
    body(psi, q, m[0, 0], m[0, 1], m[1, 0], m[1, 1])


def apply_cnot(psi, control, target):
    body = _apply_cnot_jit if _accel.USE_JIT else _apply_cnot_np
    body(psi, control, target)


# diagonal of a Z-product Hamiltonian

@njit(cache=True)
def _z_diagonal_jit(masks, coeffs, nqubits):
    size = 1 << nqubits
    out = np.zeros(size, dtype=np.float64)
    for k in range(masks.shape[0]):
        m = masks[k]
        c = coeffs[k]
        for b in range(size):
            x = b & m
            # fold to the parity bit; indices stay below 2**32
            x ^= x >> 16
            x ^= x >> 8
            x ^= x >> 4
            x ^= x >> 2
            x ^= x >> 1
            out[b] += c - 2.0 * c * (x & 1)
    return out


def _z_diagonal_np(masks, coeffs, nqubits):
    idx = np.arange(1 << nqubits, dtype=np.int64)
    out = np.zeros(idx.shape[0], dtype=np.float64)
    for mask, c in zip(masks, coeffs):
        parity = np.bitwise_count(idx & mask) & 1
        out += c * (1 - 2 * parity.astype(np.float64))
    return out


def z_diagonal(masks, coeffs, nqubits):
    """``diag(H)[b] = sum_k coeffs[k] * (-1) ** popcount(b & masks[k])``."""
    masks = np.ascontiguousarray(masks, dtype=np.int64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    body = _z_diagonal_jit if _accel.USE_JIT else _z_diagonal_np
    return body(masks, coeffs, nqubits)
