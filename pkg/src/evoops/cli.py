"""Experiment runner, on-disk result store, reports, and the command line.

A store directory is fully described by its `experiment.json` (the
experiment configuration) and `manifest.jsonl` (one line per completed run
cell, carrying the cell's seed, config hash, final best fitness, and file
paths). Re-running the same configuration over an existing store is a
no-op for completed cells, so interrupted experiments resume for free.

Subcommands:
  run      execute the (functions x algorithms x populations x repetitions) grid
  report   emit CSV reports from a store (tables, traces, embeddings, rates, stats)
  analyze  shorthand for `report --kind embeddings --kind rates`
  compare  shorthand for `report --kind tables --kind stats`
"""
from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import hashlib
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import pairwise_distances, smacof_embed
from .benchmarks import Variant, benchmark_spec, find_benchmark
from .core import RandomStream
from .engine import Algorithm, EngineConfig, RunTrace, run
from .optree import parse_tree
from .stats import compare_tables, format_text, pairwise_csv, summary_csv

logger = logging.getLogger(__name__)

STORE_VERSION = 1
REPORT_KINDS = ("tables", "traces", "embeddings", "rates", "stats")
DEFAULT_POPULATIONS = (50, 100)
DEFAULT_REPETITIONS = 50


@dataclass(frozen=True)
class ExperimentConfig:
    """The full experiment grid plus engine knobs shared by every cell."""

    functions: tuple[int, ...]
    algorithms: tuple[Algorithm, ...] = (Algorithm.AOEA, Algorithm.HAEA, Algorithm.GA)
    population_sizes: tuple[int, ...] = DEFAULT_POPULATIONS
    generations: int = 500
    kappa: int = 16
    dimensionality: int | None = None
    repetitions: int = DEFAULT_REPETITIONS
    base_seed: int = 0
    output_dir: str = "results"
    snapshot_every: int = 1
    variant: Variant = Variant.REPAIRED
    jobs: int = 1

    def __post_init__(self):
        if not self.functions:
            raise ValueError("at least one benchmark function is required")
        for f in self.functions:
            benchmark_spec(f)  # raises on unknown ids
        if len(set(self.functions)) != len(self.functions):
            raise ValueError("duplicate function ids")
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ValueError("duplicate algorithms")
        if not self.population_sizes:
            raise ValueError("at least one population size is required")
        for p in self.population_sizes:
            if p < 2:
                raise ValueError(f"population sizes must be >= 2, got {p}")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")
        if not 0 <= self.base_seed < 2**64:
            raise ValueError("base_seed must be a 64-bit non-negative integer")

    def to_mapping(self) -> dict:
        return {
            "version": STORE_VERSION,
            "functions": list(self.functions),
            "algorithms": [a.value for a in self.algorithms],
            "population_sizes": list(self.population_sizes),
            "generations": self.generations,
            "kappa": self.kappa,
            "dimensionality": self.dimensionality,
            "repetitions": self.repetitions,
            "base_seed": self.base_seed,
            "snapshot_every": self.snapshot_every,
            "variant": self.variant.value,
        }

    @classmethod
    def from_mapping(cls, mapping: dict, output_dir: str, jobs: int = 1) -> "ExperimentConfig":
        known = {
            "version", "functions", "algorithms", "population_sizes", "generations",
            "kappa", "dimensionality", "repetitions", "base_seed", "snapshot_every",
            "variant",
        }
        unknown = set(mapping) - known
        if unknown:
            raise ValueError(f"unknown experiment config keys: {sorted(unknown)}")
        return cls(
            functions=tuple(find_benchmark(f).id for f in mapping["functions"]),
            algorithms=tuple(Algorithm(a) for a in mapping.get("algorithms", ["aoea", "haea", "ga"])),
            population_sizes=tuple(int(p) for p in mapping.get("population_sizes", DEFAULT_POPULATIONS)),
            generations=int(mapping.get("generations", 500)),
            kappa=int(mapping.get("kappa", 16)),
            dimensionality=(None if mapping.get("dimensionality") is None else int(mapping["dimensionality"])),
            repetitions=int(mapping.get("repetitions", DEFAULT_REPETITIONS)),
            base_seed=int(mapping.get("base_seed", 0)),
            output_dir=output_dir,
            snapshot_every=int(mapping.get("snapshot_every", 1)),
            variant=Variant(mapping.get("variant", Variant.REPAIRED.value)),
            jobs=jobs,
        )


def derive_seed(base_seed: int, function_id: int, population: int, repetition: int) -> int:
    """64-bit run seed for one cell.

    The algorithm is deliberately not part of the derivation: all algorithms
    of a (function, population, repetition) cell share the seed, and with it
    the initial population (the engine splits the evolution stream by
    algorithm internally).
    """
    text = f"evoops:{base_seed}:{function_id}:{population}:{repetition}"
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


CellKey = tuple[int, str, int, int]  # function, algorithm value, population, repetition


def _cell_engine_config(config: ExperimentConfig, function_id: int, algorithm: Algorithm,
                        population: int, repetition: int) -> EngineConfig:
    return EngineConfig(
        problem_id=function_id,
        algorithm=algorithm,
        population_size=population,
        generations=config.generations,
        seed=derive_seed(config.base_seed, function_id, population, repetition),
        kappa=config.kappa,
        dimensionality=config.dimensionality,
        variant=config.variant,
        snapshot_every=config.snapshot_every,
    )


def _config_hash(engine_config: EngineConfig) -> str:
    d = dataclasses.asdict(engine_config)
    d["algorithm"] = engine_config.algorithm.value
    d["variant"] = engine_config.variant.value
    d["operator_selection"] = engine_config.operator_selection.value
    blob = json.dumps(d, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def _cell_stem(function_id: int, algorithm: str, population: int, repetition: int) -> str:
    return f"f{function_id:02d}_{algorithm}_p{population}_r{repetition:03d}"


def _format_float(x) -> str:
    return "" if x is None else repr(float(x))


class ResultStore:
    """On-disk layout of an experiment: manifest, traces, rates, snapshots."""

    def __init__(self, root):
        self.root = Path(root)
        self._manifest_cache: dict = {}

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.jsonl"

    @property
    def experiment_path(self) -> Path:
        return self.root / "experiment.json"

    def load_manifest(self) -> dict:
        entries: dict = {}
        if not self.manifest_path.exists():
            return entries
        with open(self.manifest_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                key = (entry["function"], entry["algorithm"], entry["population"], entry["repetition"])
                entries[key] = entry
        return entries

    def append_manifest(self, entry: dict) -> None:
        with open(self.manifest_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def load_experiment(self) -> dict:
        with open(self.experiment_path, "r", encoding="utf-8") as fh:
            return json.load(fh)

    def is_complete(self, key: CellKey, config_hash: str) -> bool:
        entry = self._manifest_cache.get(key)
        if entry is None:
            return False
        if entry["config_hash"] != config_hash:
            raise ValueError(
                f"store cell {key} was produced by a different configuration "
                f"(hash {entry['config_hash']} != {config_hash}); use a fresh output directory"
            )
        return all(
            (self.root / entry[field]).exists()
            for field in ("trace", "rates", "snapshots")
            if entry.get(field)
        )

    # -- trace I/O ---------------------------------------------------------

    def write_trace(self, rel_path: str, trace: RunTrace) -> None:
        lines = ["# trace-v1", "generation,best_fitness,median_fitness,max_rate,evals"]
        for rec in trace.records:
            lines.append(
                f"{rec.generation},{rec.best_fitness!r},{rec.median_fitness!r},"
                f"{_format_float(rec.max_rate)},{rec.evaluations}"
            )
        path = self.root / rel_path
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    def read_trace(self, rel_path: str) -> dict:
        rows = []
        with open(self.root / rel_path, "r", encoding="utf-8") as fh:
            header = None
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if header is None:
                    header = line.split(",")
                    continue
                rows.append(line.split(","))
        if header is None:
            raise ValueError(f"empty trace file {rel_path}")
        cols = {name: i for i, name in enumerate(header)}
        out = {
            "generation": np.array([int(r[cols["generation"]]) for r in rows]),
            "best_fitness": np.array([float(r[cols["best_fitness"]]) for r in rows]),
            "median_fitness": np.array([float(r[cols["median_fitness"]]) for r in rows]),
            "max_rate": np.array(
                [float(r[cols["max_rate"]]) if r[cols["max_rate"]] else np.nan for r in rows]
            ),
            "evals": np.array([int(r[cols["evals"]]) for r in rows]),
        }
        return out

    def write_rates(self, rel_path: str, trace: RunTrace) -> None:
        width = len(trace.records[0].rates)
        head = ",".join(f"rate_{i}" for i in range(width))
        lines = ["# rates-v1", f"generation,max_rate,{head}"]
        for rec in trace.records:
            rates = ",".join(repr(float(r)) for r in rec.rates)
            lines.append(f"{rec.generation},{rec.max_rate!r},{rates}")
        path = self.root / rel_path
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    def write_snapshots(self, rel_path: str, trace: RunTrace) -> None:
        lines = ["# snapshot-v1"]
        for rec in trace.records:
            if rec.trees is None:
                continue
            for idx, text in enumerate(rec.trees):
                lines.append(f"{rec.generation}\t{idx}\t{text}")
        path = self.root / rel_path
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    def read_snapshots(self, rel_path: str) -> dict:
        """Snapshot file -> {generation: [serialized tree, ...] in index order}."""
        by_gen: dict = {}
        with open(self.root / rel_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                gen_s, idx_s, text = line.split("\t")
                by_gen.setdefault(int(gen_s), []).append((int(idx_s), text))
        return {
            gen: [text for _, text in sorted(items)] for gen, items in sorted(by_gen.items())
        }


def _store_cell(store: ResultStore, engine_config: EngineConfig, repetition: int,
                trace: RunTrace) -> None:
    algorithm = engine_config.algorithm.value
    stem = _cell_stem(engine_config.problem_id, algorithm, engine_config.population_size,
                      repetition)
    trace_rel = f"traces/{stem}.csv"
    store.write_trace(trace_rel, trace)
    has_rates = trace.records[0].rates is not None
    rates_rel = f"rates/{stem}.csv" if has_rates else None
    if rates_rel:
        store.write_rates(rates_rel, trace)
    has_snapshots = any(rec.trees is not None for rec in trace.records)
    snaps_rel = f"snapshots/{stem}.txt" if has_snapshots else None
    if snaps_rel:
        store.write_snapshots(snaps_rel, trace)
    entry = {
        "function": engine_config.problem_id,
        "algorithm": algorithm,
        "population": engine_config.population_size,
        "repetition": repetition,
        "seed": engine_config.seed,
        "config_hash": _config_hash(engine_config),
        "best_fitness": trace.best.fitness,
        "evaluations": trace.records[-1].evaluations,
        "generations": engine_config.generations,
        "trace": trace_rel,
        "rates": rates_rel,
        "snapshots": snaps_rel,
    }
    store.append_manifest(entry)
    store._manifest_cache[(entry["function"], entry["algorithm"], entry["population"],
                           entry["repetition"])] = entry


def _iter_cells(config: ExperimentConfig):
    for function_id in config.functions:
        for population in config.population_sizes:
            for repetition in range(config.repetitions):
                for algorithm in config.algorithms:
                    yield function_id, population, repetition, algorithm


def run_experiment(config: ExperimentConfig, force: bool = False) -> ResultStore:
    """Execute every grid cell not already completed in the store.

    An existing store must have been produced by the same experiment
    configuration (jobs and output location aside); otherwise this raises
    before any run starts. ``force`` recomputes completed cells in place.
    """
    store = ResultStore(config.output_dir)
    store.root.mkdir(parents=True, exist_ok=True)
    expected = config.to_mapping()
    if store.experiment_path.exists():
        existing = store.load_experiment()
        if existing != expected:
            raise ValueError(
                f"store at {store.root} holds a different experiment; "
                "use a fresh output directory"
            )
    else:
        store.experiment_path.write_text(
            json.dumps(expected, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    store._manifest_cache = store.load_manifest()

    pending = []
    for function_id, population, repetition, algorithm in _iter_cells(config):
        engine_config = _cell_engine_config(config, function_id, algorithm, population, repetition)
        key = (function_id, algorithm.value, population, repetition)
        if not force and store.is_complete(key, _config_hash(engine_config)):
            continue
        pending.append((engine_config, repetition))
    logger.info("running %d of %d cells", len(pending),
                len(config.functions) * len(config.population_sizes)
                * config.repetitions * len(config.algorithms))

    if config.jobs == 1 or len(pending) <= 1:
        for engine_config, repetition in pending:
            _store_cell(store, engine_config, repetition, run(engine_config))
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=config.jobs) as pool:
            futures = [pool.submit(run, ec) for ec, _ in pending]
            for (engine_config, repetition), future in zip(pending, futures):
                # completed futures are consumed in deterministic cell order
                _store_cell(store, engine_config, repetition, future.result())
    return store


# -- reports ----------------------------------------------------------------


def _present_and_gaps(store: ResultStore) -> tuple[dict, list]:
    config = ExperimentConfig.from_mapping(store.load_experiment(), output_dir=str(store.root))
    manifest = store.load_manifest()
    gaps = []
    for function_id, population, repetition, algorithm in _iter_cells(config):
        key = (function_id, algorithm.value, population, repetition)
        if key not in manifest:
            gaps.append(key)
    return manifest, gaps


def _reports_dir(store: ResultStore) -> Path:
    path = store.root / "reports"
    path.mkdir(parents=True, exist_ok=True)
    return path


def _comparison_report(store: ResultStore, manifest: dict):
    groups: dict = {}
    for (function_id, algorithm, population, repetition), entry in manifest.items():
        groups.setdefault((function_id, population), {}).setdefault(algorithm, {})[repetition] = (
            entry["best_fitness"]
        )
    results: dict = {}
    for (function_id, population), by_algo in sorted(groups.items()):
        common_reps = None
        for reps in by_algo.values():
            keys = set(reps)
            common_reps = keys if common_reps is None else common_reps & keys
        common = sorted(common_reps or ())
        for algorithm, reps in by_algo.items():
            results[(function_id, algorithm, population)] = np.array(
                [reps[r] for r in common], dtype=np.float64
            )
    return compare_tables(results)


def _report_tables(store: ResultStore, manifest: dict) -> list:
    report = _comparison_report(store, manifest)
    out = _reports_dir(store)
    csv_path = out / "tables.csv"
    txt_path = out / "tables.txt"
    csv_path.write_text(summary_csv(report), encoding="utf-8")
    txt_path.write_text(format_text(report), encoding="utf-8")
    return [csv_path, txt_path]


def _report_stats(store: ResultStore, manifest: dict) -> list:
    report = _comparison_report(store, manifest)
    csv_path = _reports_dir(store) / "stats.csv"
    csv_path.write_text(pairwise_csv(report), encoding="utf-8")
    return [csv_path]


def _report_traces(store: ResultStore, manifest: dict) -> list:
    groups: dict = {}
    for (function_id, algorithm, population, repetition), entry in manifest.items():
        groups.setdefault((function_id, algorithm, population), []).append(entry)
    out_dir = _reports_dir(store) / "traces"
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for (function_id, algorithm, population), entries in sorted(groups.items()):
        series = [store.read_trace(e["trace"])["best_fitness"] for e in sorted(
            entries, key=lambda e: e["repetition"])]
        lengths = {len(s) for s in series}
        if len(lengths) != 1:
            raise ValueError(
                f"trace lengths differ for f{function_id} {algorithm} p{population}: {sorted(lengths)}"
            )
        median = np.median(np.vstack(series), axis=0)
        lines = ["# trace-median-v1", "generation,median_best_fitness"]
        lines.extend(f"{g},{v!r}" for g, v in enumerate(median))
        path = out_dir / f"f{function_id:02d}_{algorithm}_p{population}.csv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)
    return written


def _report_rates(store: ResultStore, manifest: dict) -> list:
    out_dir = _reports_dir(store) / "rates"
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for key, entry in sorted(manifest.items()):
        if not entry.get("rates"):
            continue
        trace = store.read_trace(entry["trace"])
        lines = ["# max-rate-v1", "generation,max_rate"]
        lines.extend(
            f"{g},{v!r}" for g, v in zip(trace["generation"], trace["max_rate"])
        )
        stem = _cell_stem(entry["function"], entry["algorithm"], entry["population"],
                          entry["repetition"])
        path = out_dir / f"{stem}.csv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)
    return written


def _report_embeddings(store: ResultStore, manifest: dict) -> list:
    out_dir = _reports_dir(store) / "embeddings"
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for key, entry in sorted(manifest.items()):
        if not entry.get("snapshots"):
            continue
        by_gen = store.read_snapshots(entry["snapshots"])
        lines = ["# embedding-v1", "generation,tree_index,x,y,stress"]
        for gen, texts in by_gen.items():
            trees = [parse_tree(t) for t in texts]
            matrix = pairwise_distances(trees, normalization="size_sum")
            rng = RandomStream(entry["seed"], "embed", gen)
            emb = smacof_embed(matrix, rng)
            for idx in range(matrix.n):
                x, y = emb.points[idx]
                lines.append(f"{gen},{idx},{x!r},{y!r},{emb.stress!r}")
        stem = _cell_stem(entry["function"], entry["algorithm"], entry["population"],
                          entry["repetition"])
        path = out_dir / f"{stem}.csv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)
    return written


_REPORTERS = {
    "tables": _report_tables,
    "stats": _report_stats,
    "traces": _report_traces,
    "rates": _report_rates,
    "embeddings": _report_embeddings,
}


def report(store: ResultStore, kind: str) -> list:
    """Generate one report kind from a store; returns the files written.

    Missing cells are listed in reports/gaps.txt (and logged); the report
    is still produced from what is present.
    """
    if kind not in REPORT_KINDS:
        raise ValueError(f"unknown report kind {kind!r}; valid kinds: {REPORT_KINDS}")
    manifest, gaps = _present_and_gaps(store)
    written = []
    if gaps:
        logger.warning("%d cells missing from store %s", len(gaps), store.root)
        gap_path = _reports_dir(store) / "gaps.txt"
        gap_lines = [
            f"f{f:02d} {algo} p{pop} r{rep:03d}" for (f, algo, pop, rep) in sorted(gaps)
        ]
        gap_path.write_text("\n".join(gap_lines) + "\n", encoding="utf-8")
        written.append(gap_path)
    if not manifest:
        raise ValueError(f"store {store.root} has no completed cells")
    written.extend(_REPORTERS[kind](store, manifest))
    return written


# -- command line -------------------------------------------------------------


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON experiment config file")
    p.add_argument("--function", action="append", default=None,
                   help="benchmark id or name; repeatable (default: all 15)")
    p.add_argument("--algorithm", action="append", default=None,
                   choices=[a.value for a in Algorithm],
                   help="repeatable (default: aoea haea ga)")
    p.add_argument("--pop-size", action="append", type=int, default=None,
                   help="population size; repeatable (default: 50 100)")
    p.add_argument("--generations", type=int, default=None)
    p.add_argument("--kappa", type=int, default=None, help="operator pool size")
    p.add_argument("--dim", type=int, default=None, help="dimensionality override")
    p.add_argument("--reps", type=int, default=None, help="repetitions per cell")
    p.add_argument("--seed", type=int, default=None, help="base seed")
    p.add_argument("--out", type=Path, default=None, help="output directory (default: results)")
    p.add_argument("--jobs", type=int, default=None, help="concurrent cells (default: 1)")
    p.add_argument("--variant", choices=[v.value for v in Variant], default=None)
    p.add_argument("--snapshot-every", type=int, default=None,
                   help="operator snapshot cadence in generations; 0 disables")


def _experiment_from_args(args) -> ExperimentConfig:
    mapping: dict = {}
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            mapping = json.load(fh)
    if args.function:
        mapping["functions"] = args.function
    elif "functions" not in mapping:
        mapping["functions"] = [s.id for s in map(benchmark_spec, range(1, 16))]
    if args.algorithm:
        mapping["algorithms"] = args.algorithm
    if args.pop_size:
        mapping["population_sizes"] = args.pop_size
    for flag, key in (
        ("generations", "generations"), ("kappa", "kappa"), ("dim", "dimensionality"),
        ("reps", "repetitions"), ("seed", "base_seed"),
        ("snapshot_every", "snapshot_every"), ("variant", "variant"),
    ):
        value = getattr(args, flag)
        if value is not None:
            mapping[key] = value
    mapping.pop("version", None)
    out = str(args.out) if args.out is not None else mapping.pop("output_dir", "results")
    mapping.pop("output_dir", None)
    jobs = args.jobs if args.jobs is not None else int(mapping.pop("jobs", 1))
    mapping.pop("jobs", None)
    return ExperimentConfig.from_mapping(mapping, output_dir=out, jobs=jobs)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evoops",
        description="Evolutionary optimization with operators evolved as trees",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment grid")
    _add_run_flags(p_run)

    for name, help_text, kinds in (
        ("report", "emit reports from a store", None),
        ("analyze", "operator-population analysis reports (embeddings, rates)",
         ("embeddings", "rates")),
        ("compare", "algorithm comparison reports (tables, stats)", ("tables", "stats")),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", type=Path, required=True, help="store directory")
        if kinds is None:
            p.add_argument("--kind", action="append", choices=REPORT_KINDS,
                           help="repeatable (default: all kinds)")
        p.set_defaults(kinds=kinds)
    return parser


def main(argv=None) -> int:
    if not logging.getLogger().handlers:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = _experiment_from_args(args)
            store = run_experiment(config)
            print(f"store: {store.root}")
            return 0
        store = ResultStore(args.out)
        if not store.experiment_path.exists():
            raise ValueError(f"{args.out} is not an experiment store (no experiment.json)")
        kinds = args.kinds or (getattr(args, "kind", None) or list(REPORT_KINDS))
        for kind in kinds:
            for path in report(store, kind):
                print(path)
        return 0
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
