import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from denovo_qubo import data_path
from denovo_qubo.cli import OUTPUT_DIR_ENV, main
from denovo_qubo.ising import IsingModel
from denovo_qubo.qubo import read_qubo_file

from conftest import TYPE_A

READS = str(data_path("example_reads.txt"))


def run(*argv):
    return main([str(a) for a in argv] + ["--quiet"])


def load(path):
    return json.loads(path.read_text())


def test_assemble_exact_example_reads(tmp_path):
    assert run("assemble", READS, "--out", tmp_path) == 0
    for name in ("model.qubo", "ising.json", "samples.csv", "report.json", "histogram.json", "metadata.json"):
        assert (tmp_path / name).exists()
    rep = load(tmp_path / "report.json")
    assert len(rep["optimal"]) == 4
    assert {o["state"] for o in rep["optimal"]} == TYPE_A
    rotations = {tuple(o["tour"]) for o in rep["optimal"]}
    assert rotations == {(0, 1, 2, 3), (1, 2, 3, 0), (2, 3, 0, 1), (3, 0, 1, 2)}
    assert all(o["classification"] == "valid" for o in rep["optimal"])
    assert rep["overlaps"] == [[0, 7, 4, 1], [3, 0, 7, 4], [6, 3, 0, 7], [9, 6, 3, 0]]
    assert rep["settings"]["seed"] == 0
    assert rep["classification_counts"]["valid"] == 24


def test_artifacts_cross_validate(tmp_path):
    assert run("assemble", READS, "--out", tmp_path, "--backend", "sa", "--reads", 50, "--sweeps", 100) == 0
    model = read_qubo_file((tmp_path / "model.qubo").read_text())
    with open(tmp_path / "samples.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert sum(int(r["count"]) for r in rows) == 50
    for r in rows:
        x = [int(c) for c in r["state"]]
        assert float(r["energy"]) == pytest.approx(model.energy(x), abs=1e-9)
    ising = IsingModel.from_json((tmp_path / "ising.json").read_text())
    x = np.array([int(c) for c in rows[0]["state"]])
    assert ising.energy(2 * x - 1) + ising.offset == pytest.approx(float(rows[0]["energy"]))
    hist = load(tmp_path / "histogram.json")
    assert sum(hist["counts"]) == 50


def test_report_is_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run("assemble", READS, "--out", out, "--backend", "sa", "--seed", 5,
                   "--reads", 40, "--sweeps", 200) == 0
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    assert (a / "samples.csv").read_bytes() == (b / "samples.csv").read_bytes()
    assert "started" in load(a / "metadata.json")
    assert "started" not in (a / "report.json").read_text()


def test_random_reads_sa_matches_exact(tmp_path):
    rng = np.random.default_rng(8)
    reads = ["".join(rng.choice(list("ACGT"), 8)) for _ in range(4)]
    path = tmp_path / "reads.txt"
    path.write_text("\n".join(reads) + "\n")
    assert run("assemble", path, "--out", tmp_path / "e") == 0
    assert run("assemble", path, "--out", tmp_path / "s", "--backend", "sa") == 0
    assert load(tmp_path / "e" / "report.json")["min_energy"] == load(tmp_path / "s" / "report.json")["min_energy"]


def test_five_reads_exceed_exact_cap(tmp_path):
    path = tmp_path / "reads.txt"
    path.write_text("ACGTACGT\nCGTACGTT\nGTACGTTA\nTACGTTAC\nACGTTACG\n")
    assert run("assemble", path, "--out", tmp_path / "o") == 3
    assert run("assemble", path, "--out", tmp_path / "o", "--backend", "sa",
               "--reads", 20, "--sweeps", 100) == 0


def test_qaoa_backend_in_assemble(tmp_path):
    path = tmp_path / "reads.txt"
    path.write_text("ACGTAC\nTACGGA\n")
    assert run("assemble", path, "--out", tmp_path, "--backend", "qaoa", "--restarts", 3) == 0
    rep = load(tmp_path / "report.json")
    assert "qaoa" in rep and rep["total_count"] == 1000
    assert (tmp_path / "qaoa_log.jsonl").exists()


@pytest.mark.parametrize("content, code", [("", 2), ("ACGN\nACGT\n", 2), ("ACGT\n", 2)])
def test_assemble_validation_errors(tmp_path, content, code, capsys):
    path = tmp_path / "reads.txt"
    path.write_text(content)
    assert run("assemble", path, "--out", tmp_path / "o") == code
    assert "error" in capsys.readouterr().err


def test_io_errors(tmp_path):
    assert run("assemble", tmp_path / "missing.txt", "--out", tmp_path) == 1
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run("assemble", READS, "--out", blocker / "sub") == 1


def test_settings_validation(tmp_path):
    assert run("assemble", READS, "--out", tmp_path, "--sweeps", 0) == 2
    assert run("assemble", READS, "--out", tmp_path, "--beta-start", 2, "--beta-end", 1) == 2
    assert run("assemble", READS, "--out", tmp_path, "--backend", "magic") == 2
    assert run("no-such-verb") == 2


def test_solve_qubo_three_spin_file(tmp_path):
    assert run("solve-qubo", data_path("H_example.qubo"), "--vartype", "spin", "--out", tmp_path) == 0
    with open(tmp_path / "samples.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["state"] for r in rows] == ["111", "110", "000", "001", "100", "101", "011", "010"]
    np.testing.assert_allclose([float(r["energy"]) for r in rows],
                               [-1000.6, -1000.4, -999.6, -999.4, 999.4, 999.6, 1000.4, 1000.6],
                               atol=1e-12)


def test_solve_qubo_empty_and_denovo(tmp_path):
    empty = tmp_path / "empty.qubo"
    empty.write_text("p qubo 0 0 0 0\n")
    assert run("solve-qubo", empty, "--out", tmp_path / "z") == 0
    assert load(tmp_path / "z" / "report.json")["num_variables"] == 0
    fixture = data_path("denovo.qubo")
    assert run("solve-qubo", fixture, "--out", tmp_path / "e") == 0
    assert run("solve-qubo", fixture, "--out", tmp_path / "s", "--backend", "sa") == 0
    assert load(tmp_path / "e" / "report.json")["min_energy"] == -30
    assert load(tmp_path / "s" / "report.json")["min_energy"] == -30
    bad = tmp_path / "bad.qubo"
    bad.write_text("p qubo 0 1 1 0\nq0 q0 abc\n")
    assert run("solve-qubo", bad, "--out", tmp_path / "b") == 2


def test_embed(tmp_path):
    two = tmp_path / "two.json"
    two.write_text(IsingModel({0: 1.0}, {(0, 1): -1.0}).to_json())
    assert run("embed", two, "--m", 1, "--n", 1, "--t", 1, "--out", tmp_path / "a") == 0
    rep = load(tmp_path / "a" / "embedding_report.json")
    assert rep["verification"]["ok"] and rep["verification"]["num_qubits"] == 2
    assert rep["verification"]["max_chain_length"] == 1
    tri = tmp_path / "tri.json"
    tri.write_text(IsingModel({}, {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0}).to_json())
    assert run("embed", tri, "--m", 1, "--n", 1, "--t", 1, "--out", tmp_path / "b") == 3
    assert not load(tmp_path / "b" / "embedding_report.json")["found"]
    junk = tmp_path / "junk.json"
    junk.write_text("[1, 2]")
    assert run("embed", junk, "--out", tmp_path / "c") == 2


def test_embed_denovo_several_seeds(tmp_path):
    for seed in range(2):
        out = tmp_path / str(seed)
        assert run("embed", data_path("denovo_ising.json"), "--m", 4, "--n", 4, "--seed", seed, "--out", out) == 0
        assert load(out / "embedding_report.json")["verification"]["ok"]


def test_qaoa_verb(tmp_path):
    path = tmp_path / "reads.txt"
    path.write_text("ACGTAC\nTACGGA\n")
    assert run("qaoa", path, "--restarts", 5, "--top-k", 4, "--out", tmp_path) == 0
    rep = load(tmp_path / "report.json")
    assert rep["num_qubits"] == 4 and len(rep["top"]) == 4
    assert any(t["classification"] == "valid" for t in rep["top"])
    lines = (tmp_path / "qaoa_log.jsonl").read_text().splitlines()
    assert "final" in json.loads(lines[-1])


def test_config_file_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# settings\nbackend = sa\nreads = 20\nsweeps = 50\nseed = 9\n")
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "env"))
    assert run("assemble", READS, "--config", cfg, "--seed", 4) == 0
    rep = load(tmp_path / "env" / "report.json")
    assert rep["settings"]["backend"] == "sa" and rep["settings"]["reads"] == 20
    assert rep["settings"]["seed"] == 4
    cfg.write_text("colour = blue\n")
    assert run("assemble", READS, "--config", cfg) == 2
    cfg.write_text("reads = many\n")
    assert run("assemble", READS, "--config", cfg) == 2
    assert run("assemble", READS, "--config", tmp_path / "nope.cfg") == 1


def test_console_script_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "denovo_qubo.cli", "solve-qubo",
                           str(data_path("H_example.qubo")), "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "-1000.6" in proc.stdout
