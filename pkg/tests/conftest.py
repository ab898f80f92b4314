import sys

import numpy as np
import pytest

from denovo_qubo import _accel, data_path, reads_to_tsp, tsp_to_qubo
from denovo_qubo.reads import ReadSet

EXAMPLE_READS = ("ATGGCGTGCA", "GCGTGCAATG", "TGCAATGGCG", "AATGGCGTGC")
TYPE_A = {  # node-major bit vectors of the four rotations of 0 -> 1 -> 2 -> 3
    "1000010000100001",
    "0100001000011000",
    "0010000110000100",
    "0001100001000010",
}


@pytest.fixture(params=["jit", "numpy"])
def kernel_path(request, monkeypatch):
    """Run the test once per kernel implementation."""
    if request.param == "jit" and not _accel.HAVE_NUMBA:
        pytest.skip("numba unavailable or disabled")
    monkeypatch.setattr(_accel, "USE_JIT", request.param == "jit")
    return request.param


@pytest.fixture(scope="session")
def example_reads():
    return ReadSet.from_file(data_path("example_reads.txt"))


@pytest.fixture(scope="session")
def denovo_graph(example_reads):
    return reads_to_tsp(example_reads, normalize=False)


@pytest.fixture(scope="session")
def denovo_qubo(denovo_graph):
    return tsp_to_qubo(denovo_graph)


def bits_of(index, n, msb_first=True):
    order = range(n - 1, -1, -1) if msb_first else range(n)
    return np.array([(index >> k) & 1 for k in order], dtype=np.int8)


def random_qubo_matrix(rng, n, density=0.6):
    Q = rng.normal(size=(n, n)) * (rng.random((n, n)) < density)
    return np.round(Q, 3)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
