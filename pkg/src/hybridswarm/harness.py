"""Experiment grid runner: algorithms x problems x dimensions x repetitions.

Runs are identified by ``(problem, dim, algorithm, run_index)``; each gets a
seed derived from the master seed and that identity alone, so results do not
depend on execution order or worker count.
"""
from __future__ import annotations

import csv
import fnmatch
import functools
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .benchmarks import BENCHMARK_NAMES, BenchmarkSpec, make_benchmark
from .core import BudgetExhausted, ConfigError, EvaluationBudget, ObjectiveFunction, Phase, derive_seed, make_rng
from .ga import GA, GaConfig
from .hybrids import PGCHEA, PGPHEA, PGSHEA, HybridConfig
from .pso import PSO, PsoConfig
from .variation import VariationParams

logger = logging.getLogger(__name__)

ALGORITHM_NAMES = ("GA", "PSO", "PGSHEA", "PGPHEA", "PGCHEA")

# Tuned parameter sets; mutation rates are numerators c of p_m = c / n.
DEFAULT_PARAMETERS = {
    "GA": {"crossover_rate": 0.9, "mutation_numerator": 1.0},
    "PSO": {"c1": 1.97, "c2": 0.94, "w": 0.56},
    "PGSHEA": {"crossover_rate": 1.0, "mutation_numerator": 0.38, "c1": 2.63, "c2": 0.21,
               "w": 0.01, "swap_interval": 13, "starting_algorithm": "PSO"},
    "PGPHEA": {"crossover_rate": 1.0, "mutation_numerator": 0.37, "c1": 0.01, "c2": 0.26,
               "w": 0.17, "exchange_interval": 13, "exchange_number": 7},
    "PGCHEA": {"crossover_rate": 1.0, "mutation_numerator": 0.61, "c1": 1.85, "c2": 0.5,
               "w": 1.53, "starting_algorithm": "PSO"},
}

_GA_KEYS = {"crossover_rate", "mutation_numerator", "sbx_index", "mutation_index"}
_PSO_KEYS = {"c1", "c2", "w", "vmax_fraction"}
ALLOWED_PARAMETERS = {
    "GA": _GA_KEYS,
    "PSO": _PSO_KEYS,
    "PGSHEA": _GA_KEYS | _PSO_KEYS | {"swap_interval", "starting_algorithm"},
    "PGPHEA": _GA_KEYS | _PSO_KEYS | {"exchange_interval", "exchange_number"},
    "PGCHEA": _GA_KEYS | _PSO_KEYS | {"starting_algorithm"},
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["master_seed", "problems", "dimensions", "algorithms", "runs_per_cell", "budget_rule"],
    "properties": {
        "description": {"type": "string"},
        "master_seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "population_size": {"type": "integer", "minimum": 2},
        "runs_per_cell": {"type": "integer", "minimum": 1},
        "trace_stride": {"type": "integer", "minimum": 1},
        "problems": {"type": "array", "minItems": 1, "items": {"enum": list(BENCHMARK_NAMES)}},
        "dimensions": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
        "budget_rule": {
            "type": "object",
            "patternProperties": {"^[0-9]+$": {"type": "integer", "minimum": 1}},
            "additionalProperties": False,
        },
        "algorithms": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name"],
                "properties": {
                    "name": {"enum": list(ALGORITHM_NAMES)},
                    "label": {"type": "string", "pattern": "^[A-Za-z0-9_.+-]+$"},
                    "params": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {
                            "crossover_rate": {"type": "number", "minimum": 0, "maximum": 1},
                            "mutation_numerator": {"type": "number", "exclusiveMinimum": 0},
                            "sbx_index": {"type": "number", "exclusiveMinimum": 0},
                            "mutation_index": {"type": "number", "exclusiveMinimum": 0},
                            "c1": {"type": "number", "minimum": 0},
                            "c2": {"type": "number", "minimum": 0},
                            "w": {"type": "number", "minimum": 0},
                            "vmax_fraction": {"type": "number", "exclusiveMinimum": 0},
                            "swap_interval": {"type": ["integer", "null"], "minimum": 1},
                            "exchange_interval": {"type": ["integer", "null"], "minimum": 1},
                            "exchange_number": {"type": "integer", "minimum": 0},
                            "starting_algorithm": {"enum": ["PSO", "GA"]},
                        },
                    },
                },
            },
        },
    },
}


@dataclass(frozen=True)
class AlgorithmEntry:
    name: str
    params: dict = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        if not self.label:
            object.__setattr__(self, "label", self.name)


@dataclass(frozen=True)
class ExperimentConfig:
    problems: tuple
    dimensions: tuple
    algorithms: tuple
    runs_per_cell: int
    master_seed: int
    budget_rule: dict
    trace_stride: int = 100
    population_size: int = 100
    description: str = ""

    def __post_init__(self):
        missing = [d for d in self.dimensions if d not in self.budget_rule]
        if missing:
            raise ConfigError(f"budget_rule does not cover dimensions {missing}")
        labels = [a.label for a in self.algorithms]
        if len(set(labels)) != len(labels):
            raise ConfigError("algorithm labels must be unique")
        for a in self.algorithms:
            extra = set(a.params) - ALLOWED_PARAMETERS[a.name]
            if extra:
                raise ConfigError(f"{a.label}: parameters {sorted(extra)} do not apply to {a.name}")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        try:
            jsonschema.validate(data, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"config schema violation at {list(exc.absolute_path)}: {exc.message}") from None
        algorithms = tuple(AlgorithmEntry(a["name"], dict(a.get("params", {})), a.get("label", ""))
                           for a in data["algorithms"])
        return cls(
            problems=tuple(data["problems"]),
            dimensions=tuple(data["dimensions"]),
            algorithms=algorithms,
            runs_per_cell=data["runs_per_cell"],
            master_seed=data["master_seed"],
            budget_rule={int(k): v for k, v in data["budget_rule"].items()},
            trace_stride=data.get("trace_stride", 100),
            population_size=data.get("population_size", 100),
            description=data.get("description", ""),
        )

    def to_dict(self) -> dict:
        out = {
            "description": self.description,
            "master_seed": self.master_seed,
            "population_size": self.population_size,
            "runs_per_cell": self.runs_per_cell,
            "trace_stride": self.trace_stride,
            "problems": list(self.problems),
            "dimensions": list(self.dimensions),
            "budget_rule": {str(k): v for k, v in sorted(self.budget_rule.items())},
            "algorithms": [],
        }
        for a in self.algorithms:
            entry = {"name": a.name, "params": dict(a.params)}
            if a.label != a.name:
                entry["label"] = a.label
            out["algorithms"].append(entry)
        return out

    def algorithm(self, label: str) -> AlgorithmEntry:
        for a in self.algorithms:
            if a.label == label:
                return a
        raise ConfigError(f"no algorithm labelled {label!r}")

    def cells(self):
        for problem in self.problems:
            for dim in self.dimensions:
                for a in self.algorithms:
                    yield Cell(problem, dim, a.label)


def load_config(path) -> ExperimentConfig:
    if str(path) == "paper":
        return paper_config()
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return ExperimentConfig.from_dict(data)


def paper_config() -> ExperimentConfig:
    """The bundled full experiment grid (``paper.json``)."""
    text = resources.files("hybridswarm").joinpath("paper.json").read_text()
    return ExperimentConfig.from_dict(json.loads(text))


def build_algorithm(name: str, params: dict, dim: int, population_size: int = 100):
    """Instantiate an optimizer for dimension ``dim`` (p_m = numerator / dim)."""
    if name not in ALLOWED_PARAMETERS:
        raise ConfigError(f"unknown algorithm {name!r}")
    extra = set(params) - ALLOWED_PARAMETERS[name]
    if extra:
        raise ConfigError(f"parameters {sorted(extra)} do not apply to {name}")
    p = {**DEFAULT_PARAMETERS[name], **params}
    pso = PsoConfig(population_size, p.get("c1", 0.0), p.get("c2", 0.0), p.get("w", 0.0),
                    p.get("vmax_fraction", 0.5))
    variation = None
    if "crossover_rate" in p:
        variation = VariationParams(p["crossover_rate"], min(1.0, p["mutation_numerator"] / dim),
                                    p.get("sbx_index", 15.0), p.get("mutation_index", 20.0))
    if name == "GA":
        return GA(GaConfig(population_size, variation))
    if name == "PSO":
        return PSO(pso)
    config = HybridConfig(
        population_size=population_size,
        pso=pso,
        variation=variation,
        swap_interval=p.get("swap_interval"),
        exchange_interval=p.get("exchange_interval"),
        exchange_number=p.get("exchange_number", 0),
        starting_algorithm=Phase(p.get("starting_algorithm", "PSO")),
    )
    return {"PGSHEA": PGSHEA, "PGPHEA": PGPHEA, "PGCHEA": PGCHEA}[name](config)


# -- single runs ---------------------------------------------------------------------

class TracingObjective(ObjectiveFunction):
    """Counts evaluations and records best-so-far at every multiple of ``stride``."""

    def __init__(self, inner, space, stride: int, name: str = ""):
        super().__init__(name or getattr(inner, "name", "objective"), inner, space)
        self.stride = stride
        self.best = np.inf
        self.trace: list[tuple[int, float]] = []

    def __call__(self, x):
        start = self.evaluations
        out = super().__call__(x)
        values = np.atleast_1d(out)
        running = np.minimum.accumulate(np.concatenate(([self.best], values)))[1:]
        self.best = float(running[-1])
        first = (start // self.stride + 1) * self.stride
        for g in range(first, self.evaluations + 1, self.stride):
            self.trace.append((g, float(running[g - start - 1])))
        return out

    def finish(self):
        if not self.trace or self.trace[-1][0] != self.evaluations:
            self.trace.append((self.evaluations, self.best))
        return self.trace


@dataclass
class RunResult:
    state: object
    trace: list
    evaluations: int


def run_algorithm(algorithm, objective, space, max_evaluations: int, seed: int,
                  trace_stride: int = 100) -> RunResult:
    """Initialise and step ``algorithm`` until the budget refuses a step."""
    tracer = TracingObjective(objective, space, trace_stride)
    rng = make_rng(seed)
    budget = EvaluationBudget(max_evaluations)
    state = algorithm.init(tracer, space, rng, budget)
    while True:
        try:
            state = algorithm.step(state, tracer, space, rng)
        except BudgetExhausted:
            break
    if tracer.evaluations != budget.consumed:
        raise RuntimeError(f"evaluation count {tracer.evaluations} != budget ledger {budget.consumed}")
    return RunResult(state, tracer.finish(), tracer.evaluations)


def minimize(problem: str | BenchmarkSpec, dim: int | None = None, algorithm: str = "PGPHEA",
             max_evaluations: int = 25000, seed: int = 0, params: dict | None = None,
             population_size: int = 100) -> RunResult:
    """Convenience wrapper: one run of a named algorithm on a benchmark."""
    if isinstance(problem, BenchmarkSpec):
        spec = problem
    else:
        spec = make_benchmark(problem, dim, derive_seed(seed, "instance"))
    alg = build_algorithm(algorithm, params or {}, spec.dim, population_size)
    return run_algorithm(alg, spec, spec.space, max_evaluations, seed)


# -- grid ----------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Cell:
    problem: str
    dim: int
    algorithm: str


@dataclass
class RunRecord:
    problem: str
    dim: int
    algorithm: str
    run_index: int
    seed: int
    trace: list
    final_best_position: np.ndarray
    final_best_fitness: float
    evaluations: int
    wall_time: float = 0.0

    @property
    def cell(self) -> Cell:
        return Cell(self.problem, self.dim, self.algorithm)


def instance_seed(master_seed: int, problem: str, dim: int) -> int:
    return derive_seed(master_seed, "instance", problem, dim)


def run_seed(master_seed: int, cell: Cell, run_index: int) -> int:
    return derive_seed(master_seed, "run", cell.problem, cell.dim, cell.algorithm, run_index)


@functools.lru_cache(maxsize=8)
def _cached_instance(master_seed: int, problem: str, dim: int) -> BenchmarkSpec:
    return make_benchmark(problem, dim, instance_seed(master_seed, problem, dim))


def problem_instance(config: ExperimentConfig, problem: str, dim: int) -> BenchmarkSpec:
    """The benchmark instance shared by every algorithm and run of a (problem, dim)."""
    return _cached_instance(config.master_seed, problem, dim)


def run_single(config: ExperimentConfig, cell: Cell, run_index: int,
               instance: BenchmarkSpec | None = None) -> RunRecord:
    instance = instance or problem_instance(config, cell.problem, cell.dim)
    entry = config.algorithm(cell.algorithm)
    algorithm = build_algorithm(entry.name, entry.params, cell.dim, config.population_size)
    seed = run_seed(config.master_seed, cell, run_index)
    t0 = time.perf_counter()
    result = run_algorithm(algorithm, instance, instance.space, config.budget_rule[cell.dim], seed,
                           config.trace_stride)
    return RunRecord(cell.problem, cell.dim, cell.algorithm, run_index, seed, result.trace,
                     np.array(result.state.global_best_position), float(result.state.global_best_fitness),
                     result.evaluations, time.perf_counter() - t0)


def run_cell(config: ExperimentConfig, cell: Cell, instance: BenchmarkSpec | None = None) -> list[RunRecord]:
    if cell.problem not in BENCHMARK_NAMES or cell.dim not in config.budget_rule:
        raise ConfigError(f"invalid cell {cell}")
    return [run_single(config, cell, i, instance) for i in range(config.runs_per_cell)]


def _task(args):
    config_dict, cell, run_index, instance = args
    return run_single(ExperimentConfig.from_dict(config_dict), cell, run_index, instance)


def parse_filters(text: str | None) -> dict:
    """``"problem=rastrigin,dim=10"`` -> ``{"problem": "rastrigin", "dim": "10"}``."""
    filters = {}
    for part in (text or "").split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        if not sep or key not in ("problem", "dim", "algorithm"):
            raise ConfigError(f"bad filter {part!r}; expected problem=, dim= or algorithm=")
        filters[key] = value
    return filters


def cell_matches(cell: Cell, filters: dict) -> bool:
    return all(fnmatch.fnmatchcase(str(getattr(cell, key)), pattern) for key, pattern in filters.items())


def run_experiment(config: ExperimentConfig, workers: int = 1, filters: dict | None = None,
                   instances: dict | None = None) -> list[RunRecord]:
    """Run every selected cell; records come back in grid order."""
    filters = filters or {}
    instances = instances or {}
    order = {c: i for i, c in enumerate(config.cells())}
    tasks = []
    for cell in order:
        if cell_matches(cell, filters):
            inst = instances.get((cell.problem, cell.dim))
            tasks.extend((cell, r, inst) for r in range(config.runs_per_cell))
    logger.info("running %d runs over %d cells", len(tasks), len({t[0] for t in tasks}))
    if workers <= 1:
        records = [run_single(config, cell, r, inst) for cell, r, inst in tasks]
    else:
        payload = config.to_dict()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_task, [(payload, c, r, i) for c, r, i in tasks]))
    records.sort(key=lambda rec: (order[rec.cell], rec.run_index))
    return records


# -- summaries and files -------------------------------------------------------------

@dataclass(frozen=True)
class SummaryRow:
    problem: str
    dim: int
    algorithm: str
    mean: float
    sd: float
    min: float
    median: float
    max: float


def group_finals(records) -> dict:
    """``{(problem, dim): {algorithm: [final fitness by run]}}`` in record order."""
    out: dict = {}
    for rec in records:
        out.setdefault((rec.problem, rec.dim), {}).setdefault(rec.algorithm, []).append(rec.final_best_fitness)
    return out


def summarize(records) -> list[SummaryRow]:
    """Per-cell statistics of final fitness; sd is the sample sd (0 for one run)."""
    records = list(records)
    if not records:
        raise ValueError("no records to summarize")
    rows = []
    for (problem, dim), by_alg in group_finals(records).items():
        for alg, finals in by_alg.items():
            f = np.asarray(finals, dtype=float)
            sd = float(np.std(f, ddof=1)) if f.size > 1 else 0.0
            rows.append(SummaryRow(problem, dim, alg, float(np.mean(f)), sd, float(np.min(f)),
                                   float(np.median(f)), float(np.max(f))))
    return rows


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_convergence(records, path):
    _write_csv(Path(path), ["problem", "dim", "algorithm", "run", "evaluations", "best_fitness"],
               ([r.problem, r.dim, r.algorithm, r.run_index, e, _fmt(f)] for r in records for e, f in r.trace))


def write_summary(rows, path):
    _write_csv(Path(path), ["problem", "dim", "algorithm", "mean", "sd", "min", "median", "max"],
               ([r.problem, r.dim, r.algorithm, _fmt(r.mean), _fmt(r.sd), _fmt(r.min), _fmt(r.median),
                 _fmt(r.max)] for r in rows))


def write_finals(records, path):
    _write_csv(Path(path), ["problem", "dim", "algorithm", "run", "final_fitness"],
               ([r.problem, r.dim, r.algorithm, r.run_index, _fmt(r.final_best_fitness)] for r in records))


def read_finals(path) -> dict:
    """Inverse of :func:`write_finals`, grouped like :func:`group_finals`."""
    out: dict = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        expected = ["problem", "dim", "algorithm", "run", "final_fitness"]
        if reader.fieldnames != expected:
            raise ConfigError(f"{path}: expected columns {expected}, got {reader.fieldnames}")
        for row in reader:
            key = (row["problem"], int(row["dim"]))
            out.setdefault(key, {}).setdefault(row["algorithm"], []).append(float(row["final_fitness"]))
    return out


def write_manifest(config: ExperimentConfig, path, filters: dict | None = None):
    """Config plus every Weierstrass instance needed to replay the grid."""
    instances = []
    for problem in config.problems:
        if problem != "weierstrass":
            continue
        for dim in config.dimensions:
            if filters and not any(cell_matches(Cell(problem, dim, a.label), filters) for a in config.algorithms):
                continue
            inst = problem_instance(config, problem, dim)
            instances.append({"problem": problem, "dim": dim,
                              "seed": instance_seed(config.master_seed, problem, dim),
                              "shift": inst.shift.tolist(), "rotation": inst.rotation.tolist()})
    manifest = {"config": config.to_dict(), "master_seed": config.master_seed,
                "filters": filters or {}, "instances": instances}
    with open(path, "w") as fh:
        json.dump(manifest, fh)
        fh.write("\n")


def load_manifest(path) -> tuple[ExperimentConfig, dict]:
    """Config and ``{(problem, dim): BenchmarkSpec}`` from a manifest."""
    with open(path) as fh:
        data = json.load(fh)
    config = ExperimentConfig.from_dict(data["config"])
    instances = {(i["problem"], i["dim"]): BenchmarkSpec(i["problem"], i["dim"], np.array(i["shift"]),
                                                         np.array(i["rotation"]))
                 for i in data["instances"]}
    return config, instances


def write_outputs(config: ExperimentConfig, records, out_dir, filters: dict | None = None) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(config, out / "manifest.json", filters)
    write_convergence(records, out / "convergence.csv")
    write_summary(summarize(records), out / "summary.csv")
    write_finals(records, out / "finals.csv")
    return out
