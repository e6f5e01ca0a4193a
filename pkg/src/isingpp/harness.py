"""Experiment harness: generate problems, sample, post-process, compare.

One experiment sweeps a set of seeded random problems over run counts,
sampling modes, and post-processing methods, then tabulates pairwise
energy comparisons: for every method pair the counts of instances where
the energies are equal (within 1e-9), where the first is lower, and where
the second is lower. Cross-mode rows compare the same method on the raw
and sampling run sets. Every byte of output is a function of the config,
so re-running a config reproduces identical files.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import asdict, dataclass, field

from .altpp import builtin_opt_pp, sample_persistence
from .core import ENERGY_ATOL, IsingProblem
from .errors import ConfigError, InputError
from .hpe import PrecisionModel, ScaleSet, hpe
from .mqc import PairingStrategy, mqc_reduce
from .rng import derive_seed
from .samplers import (
    BetaSchedule,
    SamplerParams,
    gibbs_sample,
    random_runs,
    simulated_anneal,
)
from .topology import (
    ChimeraSpec,
    ProblemGenSpec,
    chimera_graph,
    complete_graph,
    grid_graph,
    path_graph,
    random_problem,
)

MODES = ("raw", "sampling")
METHODS = (
    "mqc_sequential", "mqc_rank", "mqc_maxdiff",
    "builtin_pp", "sample_persistence", "hpe",
)
_MQC_STRATEGY = {
    "mqc_sequential": PairingStrategy.SEQUENTIAL,
    "mqc_rank": PairingStrategy.RANK_ORDER,
    "mqc_maxdiff": PairingStrategy.MAX_DIFFERENCE,
}


def default_topology() -> dict:
    return {"kind": "chimera", "rows": 4, "cols": 4, "shore": 4}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run of the harness depends on."""

    topology: dict = field(default_factory=default_topology)
    problem_count: int = 50
    gen_seed: int = 316
    h_range: tuple = (-2.0, 2.0)
    j_range: tuple = (-1.0, 1.0)
    run_counts: tuple = (200, 400)
    modes: tuple = ("raw", "sampling")
    methods: tuple = ("mqc_sequential", "mqc_rank", "mqc_maxdiff", "builtin_pp")
    master_seed: int = 2024
    sa_sweeps: int = 100
    sa_beta_start: float = 0.1
    sa_beta_end: float = 5.0
    sa_interpolation: str = "geometric"
    gibbs_beta: float = 1.0
    gibbs_burn_in: int = 1000
    gibbs_thinning: int = 10
    width_cap: int = 4
    persistence_threshold: float = 0.9
    persistence_rounds: int = 3
    hpe_scales: tuple = (1.0, 2.0, 4.0, 8.0)
    hpe_levels: int = 17

    def __post_init__(self):
        object.__setattr__(self, "run_counts", tuple(int(n) for n in self.run_counts))
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "h_range", tuple(float(x) for x in self.h_range))
        object.__setattr__(self, "j_range", tuple(float(x) for x in self.j_range))
        object.__setattr__(self, "hpe_scales", tuple(float(s) for s in self.hpe_scales))
        if self.problem_count < 1:
            raise ConfigError(f"problem_count must be positive, got {self.problem_count}")
        if not self.run_counts or any(n < 1 for n in self.run_counts):
            raise ConfigError(f"run_counts must be positive, got {self.run_counts}")
        if not self.modes or any(m not in MODES for m in self.modes):
            raise ConfigError(f"modes must be a nonempty subset of {MODES}, got {self.modes}")
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise ConfigError(
                f"methods must be a nonempty subset of {METHODS}, got {self.methods}"
            )
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError(f"duplicate methods in {self.methods}")

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("run_counts", "modes", "methods", "h_range", "j_range", "hpe_scales"):
            d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**doc)


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: line {e.lineno}: {e.msg}") from e
    return ExperimentConfig.from_dict(doc)


def topology_graph(topology: dict):
    """Edge list and vertex count for a topology description."""
    kind = topology.get("kind")
    if kind == "chimera":
        spec = ChimeraSpec(topology["rows"], topology["cols"], topology["shore"])
        return chimera_graph(spec), spec.vertex_count
    if kind == "complete":
        n = topology["n"]
        return complete_graph(n), n
    if kind == "path":
        n = topology["n"]
        return path_graph(n), n
    if kind == "grid":
        rows, cols = topology["rows"], topology["cols"]
        return grid_graph(rows, cols), rows * cols
    raise ConfigError(f"unknown topology kind {kind!r}")


def problem_for(config: ExperimentConfig, index: int) -> IsingProblem:
    """Problem ``index`` of the configured family."""
    if not (0 <= index < config.problem_count):
        raise ConfigError(f"problem index {index} outside 0..{config.problem_count - 1}")
    graph, n = topology_graph(config.topology)
    spec = ProblemGenSpec(
        h_range=config.h_range,
        j_range=config.j_range,
        seed=derive_seed(config.gen_seed, "problem", index),
    )
    return random_problem(graph, spec, vertex_count=n)


def _sa_params(config, num_runs, seed):
    return SamplerParams(
        num_runs=num_runs, seed=seed, sweeps=config.sa_sweeps,
        beta_schedule=BetaSchedule(
            config.sa_beta_start, config.sa_beta_end, config.sa_interpolation
        ),
    )


def _gibbs_params(config, num_runs, seed):
    return SamplerParams(
        num_runs=num_runs, seed=seed,
        fixed_beta=config.gibbs_beta,
        burn_in=config.gibbs_burn_in, thinning=config.gibbs_thinning,
    )


def mode_runset(config: ExperimentConfig, problem: IsingProblem, index: int,
                mode: str, num_runs: int):
    """The run set a (problem, mode, run count) cell starts from."""
    seed = derive_seed(config.master_seed, "sample", mode, num_runs, index)
    pid = f"p{index:04d}"
    if mode == "raw":
        return simulated_anneal(problem, _sa_params(config, num_runs, seed), problem_id=pid)
    if mode == "sampling":
        return gibbs_sample(problem, _gibbs_params(config, num_runs, seed), problem_id=pid)
    raise ConfigError(f"unknown mode {mode!r}")


def apply_method(config: ExperimentConfig, problem: IsingProblem, runset,
                 method: str, mode: str, index: int) -> dict:
    """Run one post-processor; returns its record fields."""
    if method in _MQC_STRATEGY:
        final, trace = mqc_reduce(problem, runset, _MQC_STRATEGY[method])
        return {"energy": final.energy, "levels": len(trace.levels)}
    if method == "builtin_pp":
        out = builtin_opt_pp(problem, runset, config.width_cap)
        return {"energy": float(out.energies().min())}
    if method == "sample_persistence":
        sampler = simulated_anneal if mode == "raw" else gibbs_sample
        maker = _sa_params if mode == "raw" else _gibbs_params
        params = maker(config, len(runset),
                       derive_seed(config.master_seed, "persistence", mode, index))
        final = sample_persistence(
            problem, sampler, params,
            threshold=config.persistence_threshold,
            rounds=config.persistence_rounds,
            initial_runs=runset,
        )
        return {"energy": final.energy}
    if method == "hpe":
        # Budget parity: split the cell's run count across the scales.
        per_scale = max(1, len(runset) // len(config.hpe_scales))
        sampler = simulated_anneal if mode == "raw" else gibbs_sample
        maker = _sa_params if mode == "raw" else _gibbs_params
        params = maker(config, per_scale,
                       derive_seed(config.master_seed, "hpe", mode, index))
        final, report = hpe(
            problem,
            ScaleSet(config.hpe_scales, per_scale),
            PrecisionModel(h_clip=config.h_range, j_clip=config.j_range,
                           levels=config.hpe_levels),
            params, sampler=sampler,
        )
        return {"energy": final.energy}
    raise ConfigError(f"unknown method {method!r}")


def run_experiment(config: ExperimentConfig, out_dir=None):
    """Execute the full sweep; returns (records, report rows).

    One record per problem x run count x mode x method, each carrying the
    method's final energy and the best energy among the input runs. With
    ``out_dir`` set, writes config.json, results.jsonl, report.json, and
    report.txt.
    """
    records = []
    for index in range(config.problem_count):
        problem = problem_for(config, index)
        for num_runs in config.run_counts:
            for mode in config.modes:
                runset = mode_runset(config, problem, index, mode, num_runs)
                best_input = float(runset.energies().min())
                for method in config.methods:
                    fields = apply_method(config, problem, runset, method, mode, index)
                    rec = {
                        "problem": index,
                        "problem_id": runset.problem_id,
                        "run_count": num_runs,
                        "mode": mode,
                        "method": method,
                        "best_input": best_input,
                    }
                    rec.update(fields)
                    records.append(rec)
    rows = build_report(records, config)
    if out_dir is not None:
        write_outputs(config, records, rows, out_dir)
    return records, rows


@dataclass(frozen=True, slots=True)
class ComparisonRow:
    """=/</> counts for one method-mode pair at one run count."""

    run_count: int
    method_a: str
    mode_a: str
    method_b: str
    mode_b: str
    equal: int
    a_lower: int
    b_lower: int

    @property
    def label(self) -> str:
        if self.mode_a == self.mode_b:
            return f"{self.mode_a}: {self.method_a} vs {self.method_b}"
        return f"{self.method_a}: {self.mode_a} vs {self.mode_b}"

    def to_dict(self) -> dict:
        return asdict(self)


def _compare(records, run_count, method_a, mode_a, method_b, mode_b):
    lookup = {}
    for r in records:
        if r["run_count"] == run_count:
            lookup[(r["problem"], r["mode"], r["method"])] = r["energy"]
    equal = a_lower = b_lower = 0
    problems = sorted({r["problem"] for r in records})
    for p in problems:
        ea = lookup.get((p, mode_a, method_a))
        eb = lookup.get((p, mode_b, method_b))
        if ea is None or eb is None:
            raise InputError(
                f"missing results for problem {p} at run count {run_count}"
            )
        if abs(ea - eb) <= ENERGY_ATOL:
            equal += 1
        elif ea < eb:
            a_lower += 1
        else:
            b_lower += 1
    return ComparisonRow(run_count, method_a, mode_a, method_b, mode_b,
                         equal, a_lower, b_lower)


def build_report(records, config: ExperimentConfig):
    """All comparison rows derivable from a record list."""
    if not records:
        raise InputError("no records to compare")
    rows = []
    for num_runs in config.run_counts:
        for mode in config.modes:
            for i, ma in enumerate(config.methods):
                for mb in config.methods[i + 1:]:
                    rows.append(_compare(records, num_runs, ma, mode, mb, mode))
        if "raw" in config.modes and "sampling" in config.modes:
            for m in config.methods:
                rows.append(_compare(records, num_runs, m, "raw", m, "sampling"))
    return rows


def render_report(rows) -> str:
    """Plain-text table: runs | comparison | = | < | >."""
    header = ("runs", "comparison", "=", "<", ">")
    body = [
        (str(r.run_count), r.label, str(r.equal), str(r.a_lower), str(r.b_lower))
        for r in rows
    ]
    widths = [max(len(row[i]) for row in [header] + body) for i in range(5)]
    lines = []
    for row in [header] + body:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"


def write_outputs(config: ExperimentConfig, records, rows, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "config.json"), "w", encoding="utf-8") as f:
        json.dump(config.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    with open(os.path.join(out_dir, "results.jsonl"), "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, sort_keys=True) + "\n")
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as f:
        json.dump([r.to_dict() for r in rows], f, indent=2, sort_keys=True)
        f.write("\n")
    with open(os.path.join(out_dir, "report.txt"), "w", encoding="utf-8") as f:
        f.write(render_report(rows))


def load_records(path):
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for i, line in enumerate(f):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise InputError(f"{path}: line {i + 1}: {e.msg}") from e
    if not records:
        raise InputError(f"{path}: no records")
    return records


def report_from_records(records):
    """Rebuild comparison rows from a results file's records."""
    run_counts = sorted({r["run_count"] for r in records})
    modes = sorted({r["mode"] for r in records})
    methods = sorted({r["method"] for r in records})
    rows = []
    for num_runs in run_counts:
        for mode in modes:
            for i, ma in enumerate(methods):
                for mb in methods[i + 1:]:
                    rows.append(_compare(records, num_runs, ma, mode, mb, mode))
        if "raw" in modes and "sampling" in modes:
            for m in methods:
                rows.append(_compare(records, num_runs, m, "raw", m, "sampling"))
    return rows


@dataclass(frozen=True, slots=True)
class SensitivityReport:
    """Strategy-pair comparisons plus the instances where strategies split."""

    rows: tuple
    differing: tuple  # (problem, run_count, mode) triples
    records: tuple

    def to_dict(self) -> dict:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "differing": [list(d) for d in self.differing],
            "records": list(self.records),
        }


def sensitivity_report(config: ExperimentConfig, out_dir=None) -> SensitivityReport:
    """Reduce identical run sets under all three pairing strategies.

    Flags every (problem, run count, mode) cell whose three final
    energies are not all equal within tolerance.
    """
    strategies = ("mqc_sequential", "mqc_rank", "mqc_maxdiff")
    records = []
    differing = []
    for index in range(config.problem_count):
        problem = problem_for(config, index)
        for num_runs in config.run_counts:
            for mode in config.modes:
                runset = mode_runset(config, problem, index, mode, num_runs)
                energies = {}
                for method in strategies:
                    final, _ = mqc_reduce(problem, runset, _MQC_STRATEGY[method])
                    energies[method] = final.energy
                    records.append({
                        "problem": index, "run_count": num_runs, "mode": mode,
                        "method": method, "energy": final.energy,
                        "best_input": float(runset.energies().min()),
                    })
                values = list(energies.values())
                if max(values) - min(values) > ENERGY_ATOL:
                    differing.append((index, num_runs, mode))
    rows = []
    for num_runs in config.run_counts:
        for mode in config.modes:
            for i, ma in enumerate(strategies):
                for mb in strategies[i + 1:]:
                    rows.append(_compare(records, num_runs, ma, mode, mb, mode))
    report = SensitivityReport(tuple(rows), tuple(differing), tuple(records))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "sensitivity.json"), "w", encoding="utf-8") as f:
            json.dump(report.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
        with open(os.path.join(out_dir, "sensitivity.txt"), "w", encoding="utf-8") as f:
            f.write(render_report(report.rows))
            f.write(f"\ninstances with differing strategies: {len(report.differing)}\n")
    return report


def bench_reduce(problem: IsingProblem, run_counts, seed: int,
                 strategy: PairingStrategy = PairingStrategy.SEQUENTIAL,
                 repeats: int = 3):
    """Wall time of mqc_reduce per run count, best of ``repeats``.

    Run generation is excluded from the timed region.
    """
    if repeats < 1:
        raise ConfigError(f"repeats must be positive, got {repeats}")
    points = []
    for num_runs in run_counts:
        runset = random_runs(problem, num_runs, derive_seed(seed, "bench", num_runs))
        best = None
        for _ in range(repeats):
            start = time.perf_counter()
            mqc_reduce(problem, runset, strategy)
            elapsed = time.perf_counter() - start
            best = elapsed if best is None else min(best, elapsed)
        points.append({"run_count": num_runs, "seconds": best})
    return points
