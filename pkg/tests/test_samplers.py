import numpy as np
import pytest

from denovo_qubo import _accel, kernels
from denovo_qubo.ising import qubo_to_ising
from denovo_qubo.qubo import QuboModel, qubo_energy
from denovo_qubo.samplers import (EXACT_CAP, AnnealSchedule, TooLargeError, default_beta_range,
                                  solve_exact, solve_sa)
from denovo_qubo.sampleset import BINARY, SPIN, SampleSet

from conftest import TYPE_A, random_qubo_matrix


@pytest.mark.parametrize("seed", range(5))
def test_exact_matches_per_state_evaluation(kernel_path, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 13))
    m = QuboModel(random_qubo_matrix(rng, n))
    res = solve_exact(m)
    assert len(res) == 1 << n
    for s, e, _ in list(res)[:: max(1, len(res) // 64)]:
        assert e == pytest.approx(qubo_energy(m, s), abs=1e-9)
    assert np.all(np.diff(res.energies) >= 0)


def test_exact_ties_follow_unsigned_order():
    res = solve_exact(QuboModel(np.zeros((3, 3))))
    assert res.bitstrings() == [format(k, "03b") for k in range(8)]


def test_exact_cap():
    with pytest.raises(TooLargeError, match=str(EXACT_CAP)):
        solve_exact(QuboModel(np.zeros((EXACT_CAP + 1, EXACT_CAP + 1))))
    with pytest.raises(TooLargeError, match="4"):
        solve_exact(QuboModel(np.zeros((5, 5))), cap=4)
    with pytest.raises(TypeError):
        solve_exact("not a model")


def test_empty_model():
    res = solve_exact(QuboModel(np.zeros((0, 0))))
    assert res.num_variables == 0 and res.energies.tolist() == [0.0]
    res = solve_sa(QuboModel(np.zeros((0, 0))), AnnealSchedule(sweeps=5, reads=3))
    assert res.counts.tolist() == [3]


def test_schedule_validation():
    for kwargs in ({"sweeps": 0}, {"reads": 0}, {"beta_start": -1.0},
                   {"beta_start": 2.0, "beta_end": 1.0}):
        with pytest.raises(ValueError):
            AnnealSchedule(**kwargs)


def test_schedule_betas():
    h, J = np.array([1.0, 2.0]), np.array([[0.0, 4.0], [0.0, 0.0]])
    assert default_beta_range(h, J) == (0.01, 5.0)
    betas = AnnealSchedule(sweeps=5).betas(h, J)
    assert betas[0] == pytest.approx(0.01) and betas[-1] == pytest.approx(5.0)
    assert np.all(np.diff(np.log(betas)) == pytest.approx(np.log(500) / 4))
    assert AnnealSchedule(sweeps=1).betas(h, J).tolist() == [5.0]
    # a tiny beta_end pulls the default start below it
    betas = AnnealSchedule(sweeps=2, beta_end=0.001).betas(h, J)
    assert betas[0] < betas[1] == 0.001


def test_sa_deterministic_and_bounded(denovo_qubo):
    sched = AnnealSchedule(sweeps=200, reads=100, seed=7)
    a, b = solve_sa(denovo_qubo, sched), solve_sa(denovo_qubo, sched)
    assert np.array_equal(a.states, b.states) and np.array_equal(a.counts, b.counts)
    assert a.counts.sum() == 100
    assert a.energies.min() >= -30
    np.testing.assert_allclose(a.energies, denovo_qubo.energies(a.states))


def test_sa_kernel_paths_agree(denovo_qubo, monkeypatch):
    if not _accel.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    sched = AnnealSchedule(sweeps=100, reads=50, seed=3)
    monkeypatch.setattr(_accel, "USE_JIT", True)
    a = solve_sa(denovo_qubo, sched)
    monkeypatch.setattr(_accel, "USE_JIT", False)
    b = solve_sa(denovo_qubo, sched)
    assert np.array_equal(a.states, b.states) and np.array_equal(a.counts, b.counts)


def test_sa_finds_type_a(denovo_qubo):
    res = solve_sa(denovo_qubo, AnnealSchedule(seed=0))
    assert set(res.lowest().bitstrings()) <= TYPE_A
    assert res.energies.min() == -30


def test_sa_on_ising_reports_spins(denovo_qubo):
    ising = qubo_to_ising(denovo_qubo)
    res = solve_sa(ising, AnnealSchedule(sweeps=300, reads=50))
    assert res.vartype == SPIN
    assert set(np.unique(res.states)) <= {-1, 1}
    assert res.energies.min() + ising.offset >= -30 - 1e-9


@pytest.mark.parametrize("seed", range(4))
def test_sa_reaches_exact_minimum_on_small_models(seed):
    rng = np.random.default_rng(100 + seed)
    m = QuboModel(random_qubo_matrix(rng, 8))
    exact = solve_exact(m).energies[0]
    sa = solve_sa(m, AnnealSchedule(sweeps=200, reads=50, seed=seed)).energies.min()
    assert sa == pytest.approx(exact, abs=1e-9)


def test_metropolis_paths_bit_identical():
    if not _accel.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    rng = np.random.default_rng(0)
    n, reads = 12, 8
    C = rng.normal(size=(n, n))
    C = np.triu(C, 1)
    C = C + C.T
    h = rng.normal(size=n)
    spins = rng.choice([-1.0, 1.0], size=(reads, n))
    betas = np.geomspace(0.1, 5, 30)
    thr = rng.standard_exponential((reads, len(betas), n))
    out = []
    for body in (kernels._metropolis_jit, kernels._metropolis_np):
        s = spins.copy()
        f = h + s @ C
        body(C, s, f, betas, thr)
        np.testing.assert_allclose(f, h + s @ C, atol=1e-9)
        out.append(s)
    assert np.array_equal(out[0], out[1])


# SampleSet

def test_sampleset_aggregate_sort_and_exports():
    states = np.array([[1, 0], [0, 1], [1, 0], [0, 0]])
    ss = SampleSet.aggregate(states, lambda s: s.sum(axis=1) * -1.0, BINARY)
    assert ss.bitstrings() == ["01", "10", "00"]
    assert ss.counts.tolist() == [1, 2, 1]
    assert ss.sorted_by_count().bitstrings()[0] == "10"
    assert ss.to_csv().splitlines() == ["state,energy,count", "01,-1.0,1", "10,-1.0,2", "00,0.0,1"]
    back = SampleSet.from_json(ss.to_json())
    assert np.array_equal(back.states, ss.states) and back.vartype == BINARY
    hist = ss.histogram(bins=2)
    assert sum(hist["counts"]) == 4 and len(hist["bin_edges"]) == 3
    assert ss.first[2] == 1
    assert len(ss.lowest()) == 2


def test_sampleset_validation():
    with pytest.raises(ValueError):
        SampleSet(np.zeros((2, 1)), [0.0], [1, 1])
    with pytest.raises(ValueError):
        SampleSet(np.zeros((1, 1)), [0.0], [-1])
    with pytest.raises(ValueError):
        SampleSet(np.zeros((1, 1)), [0.0], [1], vartype="TERNARY")


def test_spin_bitstrings():
    ss = SampleSet(np.array([[1, -1]]), [0.0], [1], SPIN)
    assert ss.bitstrings() == ["10"]
