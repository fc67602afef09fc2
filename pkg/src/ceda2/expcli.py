"""Experiment runner CLI.

Verbs:
  run           execute seeded repeated runs of one algorithm on named problems
  sweep         cartesian (population size x archive length) grid of runs
  demo-cluster  dump the clustering of a uniform sample as plot-ready CSV
  report        summarize an existing per-run records CSV

Configs are JSON files whose keys match the CLI flag names; flags win over
file values.  Run r of an experiment always uses seed = base_seed + r, so
any record can be reproduced in isolation.  Every CSV starts with a single
'# generated <timestamp>' comment line; everything below it is byte-stable
for a given config.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .benchmarks import get_problem
from .core import EvalBudget, Individual
from .dsts import ClusteringInput, cluster
from .eda2 import Eda2Params, TerminationPolicy, run_eda2
from .niching import (
    DEFAULT_ACCURACY_LEVELS,
    Ceda2Config,
    fev,
    peak_ratio,
    run_ceda2,
)

ALGORITHMS = ("eda2", "ceda2", "dsts-demo")

EDA2_DEFAULT_POPULATION = 80
EDA2_DEFAULT_ARCHIVE = 10
DEMO_DEFAULT_POINTS = 1000


@dataclass(frozen=True)
class ExperimentConfig:
    problems: list[str] = field(default_factory=list)
    algorithm: str = "ceda2"
    runs: int = 1
    base_seed: int = 0
    out: str = "results"
    jobs: int = 1
    trace: bool = False
    # parameter overrides; None keeps the per-algorithm default
    population_size: int | None = None  # p
    archive_length: int | None = None  # l
    selection_ratio: float = 0.35  # tau
    alpha: float = 0.8
    init_count: int | None = None  # N
    accuracy: float = 1e-6  # stagnation accuracy for ceda2
    max_fes: int | None = None  # overrides the problem budget
    accuracy_levels: tuple[float, ...] = DEFAULT_ACCURACY_LEVELS

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if self.runs < 1:
            raise ValueError("runs must be positive")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")
        object.__setattr__(self, "problems", list(self.problems))
        object.__setattr__(
            self, "accuracy_levels", tuple(float(e) for e in self.accuracy_levels)
        )


@dataclass
class RunRecord:
    problem: str
    algorithm: str
    seed: int
    fes_used: int
    fev: float | None = None  # eda2 runs
    peak_ratios: dict[str, float] | None = None  # ceda2 runs, column -> PR
    wall_time: float | None = None  # informational; never serialized
    trace: str | None = None  # per-run trace CSV path, if written


def eps_column(epsilon: float) -> str:
    """Column name for an accuracy level: 1e-k levels become eps-1e-k."""
    k = -math.log10(epsilon)
    if abs(k - round(k)) < 1e-9 and round(k) != 0:
        return f"eps-1e-{int(round(k))}"
    return f"eps-{epsilon:g}"


# ----------------------------------------------------------------------
# config loading
# ----------------------------------------------------------------------

_CONFIG_KEYS = {f.name for f in fields(ExperimentConfig)}


def load_config(path: str | Path) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return data


def merge_config(file_values: dict, flag_values: dict) -> ExperimentConfig:
    """Defaults, overridden by the config file, overridden by explicit flags."""
    merged = dict(file_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    return ExperimentConfig(**merged)


# ----------------------------------------------------------------------
# single runs
# ----------------------------------------------------------------------


def _trace_path(out: Path, problem_id: str, seed: int) -> Path:
    safe = problem_id.replace("/", "-")
    return out / "traces" / f"{safe}-seed{seed}.csv"


def _write_rows(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def execute_run(problem_id: str, seed: int, config: ExperimentConfig) -> RunRecord:
    """One fully independent seeded run; safe to call from worker processes."""
    problem = get_problem(problem_id)
    rng = np.random.default_rng(seed)
    out = Path(config.out)
    started = time.perf_counter()

    if config.algorithm == "eda2":
        params = Eda2Params(
            population_size=config.population_size or EDA2_DEFAULT_POPULATION,
            selection_ratio=config.selection_ratio,
            archive_length=(
                config.archive_length
                if config.archive_length is not None
                else EDA2_DEFAULT_ARCHIVE
            ),
            sense=problem.sense,
        )
        termination = TerminationPolicy(
            max_fes=config.max_fes if config.max_fes is not None else problem.max_fes
        )
        result = run_eda2(problem.func, problem.bounds, params, termination, rng)
        trace = None
        if config.trace:
            path = _trace_path(out, problem_id, seed)
            _write_rows(
                path,
                ["generation", "fes_used", "best_fitness", "median_fitness"],
                [
                    [g.generation, g.fes_used, repr(g.best_fitness), repr(g.median_fitness)]
                    for g in result.history
                ],
            )
            trace = str(path)
        return RunRecord(
            problem=problem_id,
            algorithm="eda2",
            seed=seed,
            fes_used=result.fes_used,
            fev=fev(result.best, problem),
            wall_time=time.perf_counter() - started,
            trace=trace,
        )

    if config.algorithm == "ceda2":
        ceda_config = Ceda2Config(
            init_count=config.init_count,
            selection_ratio=config.selection_ratio,
            alpha=config.alpha,
            cluster_population=config.population_size,
            cluster_archive_length=(
                config.archive_length if config.archive_length is not None else 5
            ),
            accuracy=config.accuracy,
            max_fes=config.max_fes,
        )
        restarts = []
        archive = run_ceda2(
            problem,
            ceda_config,
            rng,
            on_restart=restarts.append if config.trace else None,
        )
        trace = None
        if config.trace:
            path = _trace_path(out, problem_id, seed)
            _write_rows(
                path,
                ["restart", "cluster_count", "fes_consumed", "archive_size"],
                [
                    [r.restart, r.cluster_count, r.fes_consumed, r.archive_size]
                    for r in restarts
                ],
            )
            trace = str(path)
        ratios = {
            eps_column(eps): peak_ratio(archive, problem, eps).peak_ratio
            for eps in config.accuracy_levels
        }
        return RunRecord(
            problem=problem_id,
            algorithm="ceda2",
            seed=seed,
            fes_used=ceda_config.resolve_max_fes(problem),
            peak_ratios=ratios,
            wall_time=time.perf_counter() - started,
            trace=trace,
        )

    # dsts-demo: cluster a uniform sample, dump plot-ready rows
    n_points = config.init_count or DEMO_DEFAULT_POINTS
    budget = EvalBudget(n_points)
    genomes = rng.uniform(
        problem.bounds[:, 0], problem.bounds[:, 1], size=(n_points, problem.dimension)
    )
    individuals = [
        Individual(genome=g, fitness=problem.func(g), eval_index=budget.spend())
        for g in genomes
    ]
    keep = int(math.floor(config.selection_ratio * n_points + 1e-9))
    key = (lambda f: f) if problem.sense == "maximize" else (lambda f: -f)
    selected = sorted(individuals, key=lambda ind: -key(ind.fitness))[:keep]
    points = np.array([ind.genome for ind in selected])
    fitnesses = np.array([ind.fitness for ind in selected])
    result = cluster(
        ClusteringInput(
            points=points,
            fitness=fitnesses,
            sense=problem.sense,
            alpha=config.alpha,
        )
    )
    path = _trace_path(out, problem_id, seed)
    coord_names = [f"x{i}" for i in range(problem.dimension)]
    rows = []
    for i in range(len(selected)):
        rows.append(
            [repr(float(v)) for v in points[i]]
            + [
                repr(float(fitnesses[i])),
                repr(float(result.deltas[i])),
                int(result.labels[i]),
                int(i in result.centers),
            ]
        )
    _write_rows(
        path, coord_names + ["fitness", "delta", "label", "is_center"], rows
    )
    return RunRecord(
        problem=problem_id,
        algorithm="dsts-demo",
        seed=seed,
        fes_used=n_points,
        wall_time=time.perf_counter() - started,
        trace=str(path),
    )


# ----------------------------------------------------------------------
# the experiment driver
# ----------------------------------------------------------------------


def _run_spec(args):
    return execute_run(*args)


def run_experiment(config: ExperimentConfig) -> list[RunRecord]:
    """Execute every (problem, seed) run, write records and summary CSVs."""
    if not config.problems:
        raise ValueError("no problems configured")
    for problem_id in config.problems:
        get_problem(problem_id)  # fail on unknown ids before any run starts
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)

    specs = [
        (problem_id, config.base_seed + r, config)
        for problem_id in config.problems
        for r in range(config.runs)
    ]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(_run_spec, specs))
    else:
        records = [execute_run(*spec) for spec in specs]

    write_records(out / "records.csv", records, config.accuracy_levels)
    try:
        summary = summarize(records)
    except ValueError:
        summary = None  # heterogeneous records (e.g. mixed algorithms)
    if summary is not None:
        write_summary(out / "summary.csv", summary, config.accuracy_levels)
    return records


# ----------------------------------------------------------------------
# CSV layer
# ----------------------------------------------------------------------


def _timestamp_line() -> str:
    return f"# generated {datetime.now(timezone.utc).isoformat()}"


def record_header(accuracy_levels) -> list[str]:
    return ["problem", "algorithm", "seed", "fes_used", "fev"] + [
        eps_column(e) for e in accuracy_levels
    ] + ["trace"]


def write_records(path: Path, records: list[RunRecord], accuracy_levels) -> None:
    header = record_header(accuracy_levels)
    lines = [_timestamp_line(), ",".join(header)]
    for record in records:
        row = [
            record.problem,
            record.algorithm,
            str(record.seed),
            str(record.fes_used),
            "" if record.fev is None else repr(record.fev),
        ]
        for eps in accuracy_levels:
            col = eps_column(eps)
            if record.peak_ratios is None or col not in record.peak_ratios:
                row.append("")
            else:
                row.append(repr(record.peak_ratios[col]))
        row.append(record.trace or "")
        lines.append(",".join(row))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def parse_records(path: str | Path) -> list[RunRecord]:
    """Inverse of write_records; wall_time is not serialized and parses as None."""
    with open(path) as fh:
        lines = [line for line in fh.read().splitlines() if not line.startswith("#")]
    reader = csv.DictReader(lines)
    records = []
    for row in reader:
        eps_cols = [c for c in reader.fieldnames if c.startswith("eps-")]
        ratios = {c: float(row[c]) for c in eps_cols if row[c] != ""}
        records.append(
            RunRecord(
                problem=row["problem"],
                algorithm=row["algorithm"],
                seed=int(row["seed"]),
                fes_used=int(row["fes_used"]),
                fev=float(row["fev"]) if row["fev"] != "" else None,
                peak_ratios=ratios or None,
                wall_time=None,
                trace=row["trace"] or None,
            )
        )
    return records


# ----------------------------------------------------------------------
# summaries
# ----------------------------------------------------------------------


def summarize(records: list[RunRecord]) -> dict:
    """Aggregate per problem: mean/median/min/max of FEV, or mean PR per level.

    Records must be homogeneous: one algorithm, and either all FEV runs or
    all peak-ratio runs with identical accuracy columns.  Rows come out per
    problem plus an Average footer across problems.
    """
    if not records:
        raise ValueError("no records to summarize")
    algorithms = {r.algorithm for r in records}
    if len(algorithms) > 1:
        raise ValueError(f"mixed algorithms in one summary: {sorted(algorithms)}")
    kinds = {(r.fev is not None, r.peak_ratios is not None) for r in records}
    if len(kinds) > 1:
        raise ValueError("mixed record kinds in one summary")
    has_fev = records[0].fev is not None
    has_pr = records[0].peak_ratios is not None
    if not has_fev and not has_pr:
        raise ValueError("records carry neither FEV nor peak ratios")

    by_problem: dict[str, list[RunRecord]] = {}
    for record in records:
        by_problem.setdefault(record.problem, []).append(record)

    if has_pr:
        columns = list(records[0].peak_ratios)
        for record in records:
            if list(record.peak_ratios) != columns:
                raise ValueError("inconsistent accuracy columns across records")
        rows = {}
        for problem, group in by_problem.items():
            rows[problem] = {
                "runs": len(group),
                **{
                    col: float(np.mean([g.peak_ratios[col] for g in group]))
                    for col in columns
                },
            }
        footer = {
            col: float(np.mean([row[col] for row in rows.values()]))
            for col in columns
        }
        return {"kind": "pr", "columns": columns, "rows": rows, "average": footer}

    rows = {}
    for problem, group in by_problem.items():
        values = np.array([g.fev for g in group])
        rows[problem] = {
            "runs": len(group),
            "mean": float(values.mean()),
            "median": float(np.median(values)),
            "min": float(values.min()),
            "max": float(values.max()),
        }
    footer = {
        stat: float(np.mean([row[stat] for row in rows.values()]))
        for stat in ("mean", "median", "min", "max")
    }
    return {"kind": "fev", "columns": ["mean", "median", "min", "max"], "rows": rows, "average": footer}


def write_summary(path: Path, summary: dict, accuracy_levels=None) -> None:
    columns = summary["columns"]
    fmt = (lambda v: f"{v:.3f}") if summary["kind"] == "pr" else (lambda v: f"{v:.6g}")
    lines = [_timestamp_line(), ",".join(["problem", "runs"] + columns)]
    for problem in sorted(summary["rows"]):
        row = summary["rows"][problem]
        lines.append(
            ",".join([problem, str(row["runs"])] + [fmt(row[c]) for c in columns])
        )
    lines.append(
        ",".join(["Average", ""] + [fmt(summary["average"][c]) for c in columns])
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


# ----------------------------------------------------------------------
# sweep
# ----------------------------------------------------------------------


def run_sweep(
    config: ExperimentConfig, p_values: list[int], l_values: list[int]
) -> list[dict]:
    """Cartesian grid of (population size, archive length) cells.

    Each cell runs config.runs seeded runs per problem; the output rows
    carry the mean/median/min/max FEV per (problem, p, l).
    """
    if config.algorithm != "eda2":
        raise ValueError("sweep only applies to the eda2 algorithm")
    cells = []
    all_records: list[RunRecord] = []
    for problem_id in config.problems:
        for p in p_values:
            for l in l_values:
                cell_config = replace(
                    config, population_size=p, archive_length=l
                )
                records = [
                    execute_run(problem_id, config.base_seed + r, cell_config)
                    for r in range(config.runs)
                ]
                all_records.extend(records)
                values = np.array([record.fev for record in records])
                cells.append(
                    {
                        "problem": problem_id,
                        "p": p,
                        "l": l,
                        "runs": config.runs,
                        "mean_fev": float(values.mean()),
                        "median_fev": float(np.median(values)),
                        "min_fev": float(values.min()),
                        "max_fev": float(values.max()),
                    }
                )
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    write_records(out / "records.csv", all_records, config.accuracy_levels)
    lines = [
        _timestamp_line(),
        "problem,p,l,runs,mean_fev,median_fev,min_fev,max_fev",
    ]
    for cell in cells:
        lines.append(
            ",".join(
                [
                    cell["problem"],
                    str(cell["p"]),
                    str(cell["l"]),
                    str(cell["runs"]),
                    repr(cell["mean_fev"]),
                    repr(cell["median_fev"]),
                    repr(cell["min_fev"]),
                    repr(cell["max_fev"]),
                ]
            )
        )
    (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    return cells


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--problem", action="append", dest="problems",
                        help="problem id, repeatable (e.g. cec2013/f5)")
    parser.add_argument("--runs", type=int)
    parser.add_argument("--seed", type=int, dest="base_seed")
    parser.add_argument("--out")
    parser.add_argument("--jobs", type=int)
    parser.add_argument("--trace", action="store_const", const=True, default=None)
    parser.add_argument("--algorithm", choices=ALGORITHMS)
    parser.add_argument("--p", type=int, dest="population_size")
    parser.add_argument("--l", type=int, dest="archive_length")
    parser.add_argument("--tau", type=float, dest="selection_ratio")
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--n-init", type=int, dest="init_count")
    parser.add_argument("--accuracy", type=float)
    parser.add_argument("--max-fes", type=int, dest="max_fes")


def _config_from_args(args: argparse.Namespace, **forced) -> ExperimentConfig:
    file_values = load_config(args.config) if args.config else {}
    flag_values = {
        key: getattr(args, key, None)
        for key in _CONFIG_KEYS
        if hasattr(args, key)
    }
    flag_values.update(forced)
    return merge_config(file_values, flag_values)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ceda2", description="seeded optimization experiments"
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    run_parser = sub.add_parser("run", help="execute an experiment")
    _add_common_flags(run_parser)

    sweep_parser = sub.add_parser("sweep", help="population x archive grid")
    _add_common_flags(sweep_parser)
    sweep_parser.add_argument(
        "--p-values", type=_int_list, default=[50, 80, 110, 140, 170, 200]
    )
    sweep_parser.add_argument(
        "--l-values", type=_int_list, default=[5, 10, 15, 20, 25, 30]
    )

    demo_parser = sub.add_parser("demo-cluster", help="cluster a uniform sample")
    _add_common_flags(demo_parser)

    report_parser = sub.add_parser("report", help="summarize a records CSV")
    report_parser.add_argument("records", help="path to a records.csv")
    report_parser.add_argument("--out", help="write summary.csv here (default: stdout)")

    args = parser.parse_args(argv)
    try:
        if args.verb == "run":
            config = _config_from_args(args)
            run_experiment(config)
        elif args.verb == "sweep":
            config = _config_from_args(args, algorithm="eda2")
            run_sweep(config, args.p_values, args.l_values)
        elif args.verb == "demo-cluster":
            config = _config_from_args(args, algorithm="dsts-demo")
            if not config.problems:
                config = replace(config, problems=["cec2013/f5"])
            run_experiment(config)
        elif args.verb == "report":
            records = parse_records(args.records)
            summary = summarize(records)
            if args.out:
                write_summary(Path(args.out) / "summary.csv", summary)
            else:
                write_summary(Path("/dev/stdout"), summary)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
