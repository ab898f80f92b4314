"""Command-line pipeline: reads -> overlap graph -> QUBO/Ising -> solver -> report.

Exit codes: 0 success, 1 input/output failure, 2 invalid input or settings,
3 backend failure (instance too large, no embedding found, ...).
"""
from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .chimera import chimera_graph, find_embedding, verify_embedding
from .hamiltonian import build_cost_hamiltonian
from .ising import IsingModel, ising_from_matrix, qubo_to_ising
from .qaoa import QaoaConfig, run_qaoa
from .qubo import (QuboFormatError, assemble_sequence, decode_solution,
                   read_qubo_file, tsp_to_qubo, write_qubo_file)
from .reads import ReadFormatError, ReadSet, reads_to_tsp
from .samplers import AnnealSchedule, TooLargeError, solve_exact, solve_sa
from .sampleset import SampleSet

OUTPUT_DIR_ENV = "DENOVO_QUBO_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "denovo_out"
EXIT_IO, EXIT_VALIDATION, EXIT_BACKEND = 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# name -> (type, default); shared by flags and the key=value config file
SETTINGS = {
    "max_mismatch": (int, 0),
    "a": (float, 0.0),
    "b": (float, 13.0),
    "c": (float, 13.0),
    "weights": (str, "raw"),
    "backend": (str, "exact"),
    "vartype": (str, "binary"),
    "seed": (int, 0),
    "sweeps": (int, 1000),
    "reads": (int, 1000),
    "beta_start": (float, None),
    "beta_end": (float, None),
    "layers": (int, 1),
    "restarts": (int, 10),
    "maxiter": (int, None),
    "tol": (float, 1e-6),
    "w": (float, 100000.0),
    "shots": (int, 1000),
    "top_k": (int, 10),
    "bins": (int, 20),
    "m": (int, 8),
    "n": (int, 8),
    "t": (int, 4),
    "tries": (int, 10),
    "out": (str, None),
}
CHOICES = {"weights": ("raw", "normalized"), "backend": ("exact", "sa", "qaoa"),
           "vartype": ("binary", "spin")}


def _convert(key: str, raw, source: str):
    kind = SETTINGS[key][0]
    if raw is None or (isinstance(raw, str) and raw.strip().lower() in ("", "none")):
        return None
    try:
        value = kind(raw)
    except (TypeError, ValueError):
        raise CliError(f"{source}: {key} expects {kind.__name__}, got {raw!r}", EXIT_VALIDATION)
    if key in CHOICES and value not in CHOICES[key]:
        raise CliError(f"{source}: {key} must be one of {', '.join(CHOICES[key])}", EXIT_VALIDATION)
    return value


def load_config_file(path: str | Path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment; dashes equal underscores."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc.strerror}", EXIT_IO)
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key = value", EXIT_VALIDATION)
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in SETTINGS:
            raise CliError(f"{path}:{lineno}: unknown setting {key!r}", EXIT_VALIDATION)
        out[key] = _convert(key, value, f"{path}:{lineno}")
    return out


def resolve_settings(args: argparse.Namespace) -> dict:
    """Defaults, then the config file, then explicit flags."""
    settings = {k: v[1] for k, v in SETTINGS.items()}
    if getattr(args, "config", None):
        settings.update(load_config_file(args.config))
    for key in SETTINGS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if settings["out"] is None:
        settings["out"] = os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR
    _validate(settings)
    return settings


def _validate(s: dict) -> None:
    positive = ("sweeps", "reads", "layers", "restarts", "shots", "top_k", "bins", "m", "n", "t", "tries")
    for key in positive:
        if s[key] < 1:
            raise CliError(f"{key} must be >= 1", EXIT_VALIDATION)
    if s["max_mismatch"] < 0:
        raise CliError("max_mismatch must be >= 0", EXIT_VALIDATION)
    if s["maxiter"] is not None and s["maxiter"] < 0:
        raise CliError("maxiter must be >= 0", EXIT_VALIDATION)
    for key in ("beta_start", "beta_end", "tol"):
        if s[key] is not None and not s[key] > 0:
            raise CliError(f"{key} must be positive", EXIT_VALIDATION)
    if s["beta_start"] is not None and s["beta_end"] is not None and not s["beta_start"] < s["beta_end"]:
        raise CliError("beta_start must be below beta_end", EXIT_VALIDATION)
    if not np.isfinite([s["a"], s["b"], s["c"], s["w"]]).all():
        raise CliError("penalties must be finite", EXIT_VALIDATION)


def _schedule(s: dict) -> AnnealSchedule:
    return AnnealSchedule(sweeps=s["sweeps"], reads=s["reads"], beta_start=s["beta_start"],
                          beta_end=s["beta_end"], seed=s["seed"])


def _qaoa_config(s: dict) -> QaoaConfig:
    return QaoaConfig(layers=s["layers"], maxiter=s["maxiter"], tol=s["tol"],
                      restarts=s["restarts"], seed=s["seed"], top_k=s["top_k"])


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO)
    except UnicodeDecodeError:
        raise CliError(f"{path} is not a text file", EXIT_VALIDATION)


class Writer:
    """Writes artifacts into the output directory and remembers their names."""

    def __init__(self, directory: str):
        self.dir = Path(directory)
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise CliError(f"cannot create output directory {directory}: {exc.strerror}", EXIT_IO)
        self.written: list[str] = []

    def text(self, name: str, content: str) -> None:
        try:
            (self.dir / name).write_text(content)
        except OSError as exc:
            raise CliError(f"cannot write {self.dir / name}: {exc.strerror}", EXIT_IO)
        self.written.append(name)

    def json(self, name: str, doc) -> None:
        self.text(name, json.dumps(doc, indent=2, sort_keys=True) + "\n")

    def metadata(self, command: str, started: float, argv) -> None:
        self.json("metadata.json", {
            "command": command,
            "argv": list(argv),
            "version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "started": datetime.fromtimestamp(started, timezone.utc).isoformat(),
            "elapsed_seconds": round(time.time() - started, 6),
            "artifacts": sorted(self.written),
        })


def _energy_tol(energies: np.ndarray) -> float:
    return 1e-9 * max(1.0, float(np.max(np.abs(energies)))) if len(energies) else 0.0


def _summary(samples: SampleSet) -> dict:
    return {"num_variables": samples.num_variables,
            "distinct_states": len(samples),
            "total_count": int(samples.counts.sum()),
            "min_energy": float(samples.energies.min()) if len(samples) else None}


def _solve(model, s: dict) -> SampleSet:
    try:
        if s["backend"] == "exact":
            return solve_exact(model)
        return solve_sa(model, _schedule(s))
    except TooLargeError as exc:
        raise CliError(str(exc), EXIT_BACKEND)


def _tour_entry(reads: ReadSet, overlaps, bits, energy: float, count: int) -> dict:
    dec = decode_solution(len(reads), bits)
    entry = {"state": "".join(str(int(b)) for b in bits), "energy": energy, "count": count,
             "classification": dec.classification, "violations": dec.violations}
    if dec.valid:
        seq, closing = assemble_sequence(reads, dec.tour, overlaps)
        entry.update(tour=list(dec.tour), sequence=seq, closing_overlap=closing)
    return entry


def _assembly_report(reads: ReadSet, graph, samples: SampleSet, s: dict) -> dict:
    tol = _energy_tol(samples.energies)
    optimal = samples.lowest(atol=tol)
    classes: dict[str, int] = {}
    for bits, _, count in samples:
        key = decode_solution(len(reads), bits).classification
        classes[key] = classes.get(key, 0) + count
    best_valid = None
    for bits, e, count in samples.sorted_by_energy():
        if decode_solution(len(reads), bits).valid:
            best_valid = _tour_entry(reads, graph.overlaps, bits, e, count)
            break
    return {
        "reads": list(reads),
        "overlaps": graph.overlaps.tolist(),
        "weights": s["weights"],
        "optimal": [_tour_entry(reads, graph.overlaps, bits, e, c) for bits, e, c in optimal],
        "best_valid": best_valid,
        "classification_counts": dict(sorted(classes.items())),
        **_summary(samples),
    }


def _settings_report(s: dict, keys) -> dict:
    return {k: s[k] for k in keys}


_MODEL_KEYS = ("max_mismatch", "a", "b", "c", "weights", "backend", "seed")
_SA_KEYS = ("sweeps", "reads", "beta_start", "beta_end")
_QAOA_KEYS = ("layers", "restarts", "maxiter", "tol", "w", "shots", "top_k")


def _backend_keys(backend: str):
    return {"exact": (), "sa": _SA_KEYS, "qaoa": _QAOA_KEYS}[backend]


def _load_reads(path: str, s: dict):
    try:
        reads = ReadSet.from_text(_read_text(path))
        graph = reads_to_tsp(reads, s["max_mismatch"], normalize=s["weights"] == "normalized")
    except (ReadFormatError, ValueError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_VALIDATION)
    return reads, graph


def _run_qaoa(graph, s: dict, writer: Writer | None):
    H = build_cost_hamiltonian(graph, s["w"])
    lines: list[str] = []
    try:
        result = run_qaoa(H, _qaoa_config(s), log=lines.append)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_BACKEND)
    if writer is not None:
        writer.text("qaoa_log.jsonl", "\n".join(lines) + "\n")
    return H, result


def cmd_assemble(args) -> int:
    s = resolve_settings(args)
    started = time.time()
    reads, graph = _load_reads(args.input, s)
    if s["backend"] in ("exact", "qaoa") and len(reads) ** 2 > 24:
        raise CliError(f"{s['backend']} backend handles at most 24 variables; "
                       f"{len(reads)} reads need {len(reads) ** 2}", EXIT_BACKEND)
    model = tsp_to_qubo(graph, s["a"], s["b"], s["c"])
    ising = qubo_to_ising(model)
    writer = Writer(s["out"])
    writer.text("model.qubo", write_qubo_file(model, [f"{len(reads)} reads, {s['weights']} weights",
                                                      f"a={s['a']:g} b={s['b']:g} c={s['c']:g}"]))
    writer.text("ising.json", ising.to_json())
    extra = {}
    if s["backend"] == "qaoa":
        _, result = _run_qaoa(graph, s, writer)
        samples = result.sample(s["shots"], seed=s["seed"])
        samples = SampleSet(samples.states, model.energies(samples.states), samples.counts,
                            samples.vartype, samples.variables).sorted_by_energy()
        extra["qaoa"] = result.report()
    else:
        samples = _solve(model, s)
    writer.text("samples.csv", samples.to_csv())
    writer.json("histogram.json", samples.histogram(s["bins"]))
    report = _assembly_report(reads, graph, samples, s)
    report.update(extra)
    report["settings"] = _settings_report(s, _MODEL_KEYS + _backend_keys(s["backend"]))
    writer.json("report.json", report)
    writer.metadata("assemble", started, sys.argv)
    _say(args, f"{len(report['optimal'])} optimal state(s) at energy {report['min_energy']:.12g}; "
               f"artifacts in {writer.dir}")
    return 0


def cmd_solve_qubo(args) -> int:
    s = resolve_settings(args)
    if s["backend"] == "qaoa":
        raise CliError("solve-qubo supports the exact and sa backends", EXIT_VALIDATION)
    started = time.time()
    try:
        qubo = read_qubo_file(_read_text(args.input))
    except QuboFormatError as exc:
        raise CliError(f"{args.input}: {exc}", EXIT_VALIDATION)
    if s["vartype"] == "spin":
        model = ising_from_matrix(qubo.canonical(), qubo.labels)
        ising = model
    else:
        model = qubo
        ising = qubo_to_ising(qubo)
    samples = _solve(model, s)
    writer = Writer(s["out"])
    writer.text("model.qubo", write_qubo_file(qubo))
    writer.text("ising.json", ising.to_json())
    writer.text("samples.csv", samples.to_csv())
    writer.json("histogram.json", samples.histogram(s["bins"]))
    tol = _energy_tol(samples.energies)
    report = {
        "vartype": s["vartype"],
        "labels": list(qubo.labels),
        "lowest": [{"state": b, "energy": e, "count": c} for b, (_, e, c)
                   in zip(samples.lowest(atol=tol).bitstrings(), samples.lowest(atol=tol))],
        "settings": _settings_report(s, ("backend", "vartype", "seed") + _backend_keys(s["backend"])),
        **_summary(samples),
    }
    writer.json("report.json", report)
    writer.metadata("solve-qubo", started, sys.argv)
    _say(args, f"{len(samples)} state(s); minimum energy "
               f"{report['min_energy'] if report['min_energy'] is not None else 'n/a'}")
    return 0


def cmd_embed(args) -> int:
    s = resolve_settings(args)
    started = time.time()
    try:
        model = IsingModel.from_json(_read_text(args.input))
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise CliError(f"{args.input}: not a valid Ising model ({exc})", EXIT_VALIDATION)
    try:
        graph = chimera_graph(s["m"], s["n"], s["t"])
    except ValueError as exc:
        raise CliError(str(exc), EXIT_VALIDATION)
    emb = find_embedding(model.J.keys(), graph, seed=s["seed"], max_tries=s["tries"],
                         variables=model.variables)
    writer = Writer(s["out"])
    target = {"m": s["m"], "n": s["n"], "t": s["t"], "num_qubits": graph.num_qubits}
    if emb is None:
        writer.json("embedding_report.json", {"found": False, "target": target, "seed": s["seed"]})
        writer.metadata("embed", started, sys.argv)
        raise CliError(f"no embedding found in C({s['m']},{s['n']},{s['t']})", EXIT_BACKEND)
    check = verify_embedding(graph, emb, model.J.keys(), model.variables)
    writer.text("embedding.json", emb.to_json())
    writer.json("embedding_report.json", {"found": True, "target": target, "seed": s["seed"],
                                          "verification": check.as_dict()})
    writer.metadata("embed", started, sys.argv)
    _say(args, f"embedded {len(emb.chains)} variables on {emb.num_qubits} qubits, "
               f"max chain {emb.max_chain_length}")
    return 0 if check.ok else EXIT_BACKEND


def cmd_qaoa(args) -> int:
    s = resolve_settings(args)
    started = time.time()
    reads, graph = _load_reads(args.input, s)
    writer = Writer(s["out"])
    H, result = _run_qaoa(graph, s, writer)
    top = []
    for b in result.top:
        dec = decode_solution(len(reads), [int(ch) for ch in b.bitstring])
        top.append({"bitstring": b.bitstring, "probability": b.probability, "energy": b.energy,
                    "classification": dec.classification,
                    "tour": list(dec.tour) if dec.valid else None})
    report = result.report()
    report.update(top=top, reads=list(reads), num_qubits=H.qubit_count, num_terms=len(H),
                  min_diagonal=float(H.diagonal().min()),
                  settings=_settings_report(s, ("max_mismatch", "weights", "seed") + _QAOA_KEYS))
    writer.json("report.json", report)
    writer.metadata("qaoa", started, sys.argv)
    _say(args, f"best expectation {result.expectation:.12g} over {s['restarts']} restart(s)")
    return 0


def _say(args, message: str) -> None:
    if not getattr(args, "quiet", False):
        print(message)


def _add_common(p: argparse.ArgumentParser, keys) -> None:
    p.add_argument("--config", help="key = value settings file (flags override it)")
    p.add_argument("--out", help=f"output directory (default ${OUTPUT_DIR_ENV} or ./{DEFAULT_OUTPUT_DIR})")
    p.add_argument("--seed", type=int)
    p.add_argument("-q", "--quiet", action="store_true")
    for key in keys:
        kind, default = SETTINGS[key]
        flag = "--" + key.replace("_", "-")
        p.add_argument(flag, dest=key, type=kind, choices=CHOICES.get(key),
                       help=f"default {default}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="denovo-qubo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assemble", help="reads file to assembled sequences")
    p.add_argument("input", help="reads, one per line or FASTA")
    _add_common(p, ("max_mismatch", "a", "b", "c", "weights", "backend", "bins")
                + _SA_KEYS + _QAOA_KEYS)
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("solve-qubo", help="solve a .qubo file")
    p.add_argument("input", help=".qubo file")
    _add_common(p, ("backend", "vartype", "bins") + _SA_KEYS)
    p.set_defaults(func=cmd_solve_qubo)

    p = sub.add_parser("embed", help="minor-embed an Ising model into a Chimera graph")
    p.add_argument("input", help="ising.json as written by assemble")
    _add_common(p, ("m", "n", "t", "tries"))
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("qaoa", help="QAOA on the TSP cost Hamiltonian of a reads file")
    p.add_argument("input", help="reads, one per line or FASTA")
    _add_common(p, ("max_mismatch", "weights") + _QAOA_KEYS)
    p.set_defaults(func=cmd_qaoa)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except CliError as exc:
        print(f"denovo-qubo: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
