import numpy as np
import pytest

from denovo_qubo.hamiltonian import PauliHamiltonian, build_cost_hamiltonian
from denovo_qubo.qaoa import QaoaConfig, expectation_at, ranked_states, run_qaoa
from denovo_qubo.qubo import decode_solution
from denovo_qubo.reads import OverlapGraph

Z0 = PauliHamiltonian(1, {(0,): 1.0})


def test_single_qubit_optimum():
    res = run_qaoa(Z0, QaoaConfig(restarts=3, seed=1))
    assert res.expectation == pytest.approx(-1.0, abs=1e-3)
    assert res.top[0].bitstring == "1"


def test_fixed_zero_angles_give_diagonal_mean(denovo_graph):
    H = build_cost_hamiltonian(denovo_graph)
    res = run_qaoa(H, QaoaConfig(initial=(0.0, 0.0), maxiter=0))
    scale = np.abs(H.diagonal()).max()
    assert res.params.tolist() == [0.0, 0.0]
    assert res.expectation == pytest.approx(H.diagonal().mean(), abs=1e-12 * scale)
    assert expectation_at(H, [0.0, 0.0]) == pytest.approx(H.diagonal().mean(), abs=1e-12 * scale)


def n2_hamiltonian():
    return build_cost_hamiltonian(OverlapGraph(np.array([[0.0, 3.0], [5.0, 0.0]])))


def test_n2_valid_tour_in_top_four():
    H = n2_hamiltonian()
    res = run_qaoa(H, QaoaConfig(restarts=40, seed=0, top_k=4))
    valid = [b for b in res.top if decode_solution(2, [int(c) for c in b.bitstring]).valid]
    assert valid
    assert res.expectation >= H.diagonal().min()


def test_variational_bound_on_every_evaluation():
    H = n2_hamiltonian()
    res = run_qaoa(H, QaoaConfig(layers=2, restarts=5, seed=4))
    floor = H.diagonal().min()
    assert all(v >= floor - 1e-9 * abs(floor) for _, _, v in res.evaluations)


def test_restarts_monotone_and_reproducible():
    H = n2_hamiltonian()
    cfg = QaoaConfig(restarts=6, seed=11, maxiter=30)
    a, b = run_qaoa(H, cfg), run_qaoa(H, cfg)
    assert a.best_so_far == sorted(a.best_so_far, reverse=True)
    assert a.best_so_far[-1] == min(a.restart_values) == a.expectation
    np.testing.assert_array_equal(a.params, b.params)
    # the first k restarts of a longer run reproduce a shorter run
    short = run_qaoa(H, QaoaConfig(restarts=3, seed=11, maxiter=30))
    assert short.restart_values == a.restart_values[:3]


def test_log_lines_and_report():
    lines = []
    res = run_qaoa(Z0, QaoaConfig(restarts=2, maxiter=5), log=lines.append)
    import json
    docs = [json.loads(s) for s in lines]
    assert "final" in docs[-1]
    assert len(docs) - 1 == len(res.evaluations)
    assert set(docs[0]) == {"restart", "params", "expectation"}
    rep = res.report()
    assert set(rep["params"]) == {"gamma", "beta"}


def test_sample_counts():
    H = n2_hamiltonian()
    res = run_qaoa(H, QaoaConfig(restarts=2, seed=0))
    ss = res.sample(500, seed=1, diagonal=H.diagonal())
    assert ss.counts.sum() == 500
    for bits, e, _ in ss:
        assert e == pytest.approx(H.value(bits))


def test_ranked_states_order():
    psi = np.sqrt(np.array([0.1, 0.4, 0.1, 0.4]))
    top = ranked_states(psi, np.array([0.0, 1.0, 2.0, 3.0]), 3)
    assert [b.bitstring for b in top] == ["10", "11", "00"]


@pytest.mark.parametrize("kwargs", [{"layers": 0}, {"restarts": 0}, {"initial": (1.0,)},
                                    {"tol": 0.0}, {"maxiter": -1}, {"top_k": 0}])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        QaoaConfig(**kwargs)
