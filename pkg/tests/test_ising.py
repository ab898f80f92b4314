import numpy as np
import pytest

from denovo_qubo.ising import (IsingModel, binary_to_spins, ising_energy, ising_from_matrix,
                               qubo_to_ising, spins_to_binary)
from denovo_qubo.qubo import QuboModel, qubo_energy
from denovo_qubo.samplers import solve_exact

from conftest import TYPE_A, random_qubo_matrix


def all_states(n):
    return ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(np.int8)


@pytest.mark.parametrize("seed", range(20))
def test_offset_identity_random(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    qubo = QuboModel(random_qubo_matrix(rng, n))
    ising = qubo_to_ising(qubo)
    for x in all_states(n):
        s = binary_to_spins(x)
        assert ising_energy(ising, s) + ising.offset == pytest.approx(qubo_energy(qubo, x), abs=1e-9)


def test_offset_identity_denovo(denovo_qubo):
    ising = qubo_to_ising(denovo_qubo)
    X = all_states(16)
    np.testing.assert_allclose(ising.energies(2 * X - 1) + ising.offset, denovo_qubo.energies(X), atol=1e-9)
    assert ising.offset == 252


def test_denovo_ising_minimizers_are_type_a(denovo_qubo):
    ising = qubo_to_ising(denovo_qubo)
    lowest = solve_exact(ising).lowest()
    assert set(lowest.bitstrings()) == TYPE_A
    assert lowest.energies[0] + ising.offset == -30


def test_coefficient_rule_single_entries():
    # h_i += Q_ii / 2; an off-diagonal Q_ij adds Q/4 to J_ij, h_i, h_j and the offset
    m = qubo_to_ising(QuboModel([[2.0, 4.0], [0.0, 0.0]]))
    assert m.h == {0: 2.0, 1: 1.0}
    assert m.J == {(0, 1): 1.0}
    assert m.offset == 2.0


def test_three_spin_table():
    m = IsingModel({0: -0.5}, {(0, 1): -1000.0, (1, 2): -0.1}, variables=(0, 1, 2))
    res = solve_exact(m)
    assert [list(s) for s in res.states] == [
        [1, 1, 1], [1, 1, -1], [-1, -1, -1], [-1, -1, 1],
        [1, -1, -1], [1, -1, 1], [-1, 1, 1], [-1, 1, -1]]
    np.testing.assert_allclose(res.energies, [-1000.6, -1000.4, -999.6, -999.4,
                                              999.4, 999.6, 1000.4, 1000.6], atol=1e-12)


def test_model_normalizes_couplings():
    m = IsingModel({}, {(1, 0): 1.0, (0, 1): 2.0, (2, 3): 0.0})
    assert m.J == {(0, 1): 3.0}
    assert m.variables == (0, 1)
    with pytest.raises(ValueError):
        IsingModel({}, {(1, 1): 1.0})
    with pytest.raises(ValueError):
        IsingModel({5: 1.0}, {}, variables=(0, 1))


def test_energy_validates_spins():
    m = IsingModel({0: 1.0}, {}, variables=(0,))
    with pytest.raises(ValueError):
        ising_energy(m, [0])
    with pytest.raises(ValueError):
        ising_energy(m, [1, 1])


def test_json_roundtrip(denovo_qubo):
    m = qubo_to_ising(denovo_qubo)
    back = IsingModel.from_json(m.to_json())
    assert back.h == m.h and back.J == m.J and back.offset == m.offset
    assert back.variables == m.variables and back.labels == m.labels


def test_from_matrix_and_conversions():
    m = ising_from_matrix([[1.0, 2.0], [3.0, -1.0]])
    assert m.h == {0: 1.0, 1: -1.0} and m.J == {(0, 1): 5.0}
    assert list(spins_to_binary([-1, 1])) == [0, 1]
    assert list(binary_to_spins([0, 1])) == [-1, 1]
