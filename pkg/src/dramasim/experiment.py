"""Profile-count sweeps: repeated GA runs per profile count, summarized as CSV.

Run ``r`` uses the same seed for every profile count, so results at
different counts are paired.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import statistics
from concurrent.futures import Executor
from dataclasses import dataclass, field
from pathlib import Path

from .evolver import GAConfig, GATrace, evolve
from .fitness import get_scene
from .rng import derive_seed
from .world import WorldConfig

log = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["profiles", "best_fitness_mean", "best_fitness_std", "avg_fitness_mean", "avg_fitness_std"]
RUN_COLUMNS = ["profiles", "repetition", "seed", "initial_best_fitness", "best_fitness", "final_mean_fitness"]

DESK_SCALE = {"duration_days": 300, "fitness_replicas": 5, "generations": 10, "population_size": 15, "repetitions": 10}
PAPER_SCALE = {"duration_days": 1000, "fitness_replicas": 10, "generations": 30, "population_size": 30, "repetitions": 30}


@dataclass
class ExperimentConfig:
    scene: str = "natality"
    profile_counts: list[int] = field(default_factory=lambda: [1, 2, 3, 4, 5])
    repetitions: int = DESK_SCALE["repetitions"]
    master_seed: int = 0
    ga: dict = field(default_factory=dict)
    world: dict = field(default_factory=dict)
    out_dir: str | None = None

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.profile_counts:
            raise ValueError("profile_counts must not be empty")
        if any(not 1 <= p <= 5 for p in self.profile_counts):
            raise ValueError("profile counts must lie in 1..5")

    @classmethod
    def desk(cls, **kw) -> "ExperimentConfig":
        return cls._scaled(DESK_SCALE, **kw)

    @classmethod
    def paper(cls, **kw) -> "ExperimentConfig":
        return cls._scaled(PAPER_SCALE, **kw)

    @classmethod
    def _scaled(cls, scale: dict, **kw) -> "ExperimentConfig":
        ga = {"generations": scale["generations"], "population_size": scale["population_size"],
              "fitness_replicas": scale["fitness_replicas"]}
        ga.update(kw.pop("ga", {}))
        world = {"duration_days": scale["duration_days"]}
        world.update(kw.pop("world", {}))
        kw.setdefault("repetitions", scale["repetitions"])
        return cls(ga=ga, world=world, **kw)

    @classmethod
    def from_json(cls, path: Path | str) -> "ExperimentConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        data.pop("format_version", None)
        scale = PAPER_SCALE if data.pop("paper_scale", False) else DESK_SCALE
        return cls._scaled(scale, **data)

    def ga_config(self, profiles: int, seed: int) -> GAConfig:
        world = WorldConfig(**{**self.world, "profile_count": profiles})
        return GAConfig(**{**self.ga, "master_seed": seed, "scene": get_scene(self.scene), "world": world})

    def run_seed(self, repetition: int) -> int:
        return derive_seed(self.master_seed, repetition)


@dataclass
class RunResult:
    profiles: int
    repetition: int
    seed: int
    initial_best_fitness: float
    best_fitness: float
    final_mean_fitness: float
    best_per_generation: list[float]
    mean_per_generation: list[float]

    @classmethod
    def from_trace(cls, profiles: int, repetition: int, seed: int, trace: GATrace) -> "RunResult":
        return cls(
            profiles, repetition, seed,
            trace.records[0].best_fitness, trace.best_fitness, trace.final_mean_fitness,
            [r.best_fitness for r in trace.records], [r.mean_fitness for r in trace.records],
        )


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    runs: list[RunResult]
    failures: list[dict] = field(default_factory=list)

    def by_profiles(self) -> dict[int, list[RunResult]]:
        out: dict[int, list[RunResult]] = {p: [] for p in self.config.profile_counts}
        for r in self.runs:
            out[r.profiles].append(r)
        return out

    def summary_rows(self) -> list[dict]:
        return summarize(self.runs, self.config.profile_counts)

    def summary_csv(self) -> str:
        return summary_csv(self.summary_rows())


def _std(values: list[float]) -> float:
    return statistics.stdev(values) if len(values) > 1 else 0.0


def summarize(runs: list[RunResult], profile_counts: list[int]) -> list[dict]:
    rows = []
    for p in profile_counts:
        best = [r.best_fitness for r in runs if r.profiles == p]
        avg = [r.final_mean_fitness for r in runs if r.profiles == p]
        if not best:
            continue
        rows.append({
            "profiles": p,
            "best_fitness_mean": statistics.fmean(best),
            "best_fitness_std": _std(best),
            "avg_fitness_mean": statistics.fmean(avg),
            "avg_fitness_std": _std(avg),
        })
    return rows


def summary_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for row in rows:
        w.writerow([row["profiles"]] + [f"{row[c]:.6f}" for c in SUMMARY_COLUMNS[1:]])
    return buf.getvalue()


def _run_one(args) -> tuple[int, int, int, GATrace]:
    cfg, profiles, rep = args
    seed = cfg.run_seed(rep)
    return profiles, rep, seed, evolve(cfg.ga_config(profiles, seed))


def run_experiment(cfg: ExperimentConfig, executor: Executor | None = None,
                   progress=None) -> ExperimentResult:
    """Run every (profile count, repetition) GA and write artifacts to ``cfg.out_dir``.

    A failing run is logged and recorded; the summary covers the rest.
    """
    jobs = [(cfg, p, rep) for p in cfg.profile_counts for rep in range(cfg.repetitions)]
    out_dir = Path(cfg.out_dir) if cfg.out_dir else None
    result = ExperimentResult(cfg, [])

    def collect(job, fn):
        _, p, rep = job
        try:
            profiles, rep, seed, trace = fn()
        except Exception as exc:  # one bad run must not sink the sweep
            log.exception("run P=%d rep=%d failed", p, rep)
            result.failures.append({"profiles": p, "repetition": rep, "error": repr(exc)})
            return
        if out_dir is not None:
            trace.write(out_dir / f"P{profiles}" / f"run{rep:02d}")
        result.runs.append(RunResult.from_trace(profiles, rep, seed, trace))
        if progress is not None:
            progress(result.runs[-1])

    if executor is None:
        for job in jobs:
            collect(job, lambda job=job: _run_one(job))
    else:
        futures = [(job, executor.submit(_run_one, job)) for job in jobs]
        for job, fut in futures:
            collect(job, fut.result)

    result.runs.sort(key=lambda r: (r.profiles, r.repetition))
    if out_dir is not None:
        write_experiment(result, out_dir)
    return result


def runs_csv(runs: list[RunResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RUN_COLUMNS)
    for r in runs:
        w.writerow([r.profiles, r.repetition, r.seed, repr(r.initial_best_fitness),
                    repr(r.best_fitness), repr(r.final_mean_fitness)])
    return buf.getvalue()


def write_experiment(result: ExperimentResult, out_dir: Path) -> None:
    from .plotting import plot_best_boxplot, plot_evolution

    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "summary.csv").write_text(result.summary_csv(), encoding="utf-8")
    (out_dir / "runs.csv").write_text(runs_csv(result.runs), encoding="utf-8")
    cfg = result.config
    (out_dir / "experiment.json").write_text(json.dumps({
        "format_version": 1,
        "scene": cfg.scene,
        "profile_counts": cfg.profile_counts,
        "repetitions": cfg.repetitions,
        "master_seed": cfg.master_seed,
        "ga": cfg.ga,
        "world": cfg.world,
        "failures": result.failures,
    }, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if result.runs:
        figures = out_dir / "figures"
        plot_evolution(result, figures / "evolution.png")
        plot_best_boxplot(result, figures / "best_fitness_boxplot.png")


def read_traces(out_dir: Path | str) -> list[RunResult]:
    """Rebuild run results from the per-run ``trace.csv`` files."""
    out_dir = Path(out_dir)
    seeds = {}
    runs_path = out_dir / "runs.csv"
    if runs_path.exists():
        for row in csv.DictReader(runs_path.open(encoding="utf-8")):
            seeds[(int(row["profiles"]), int(row["repetition"]))] = int(row["seed"])
    runs = []
    for trace_path in sorted(out_dir.glob("P*/run*/trace.csv")):
        p = int(trace_path.parent.parent.name[1:])
        rep = int(trace_path.parent.name[3:])
        rows = list(csv.DictReader(trace_path.open(encoding="utf-8")))
        best = [float(r["best_fitness"]) for r in rows]
        mean = [float(r["mean_fitness"]) for r in rows]
        runs.append(RunResult(p, rep, seeds.get((p, rep), 0), best[0], best[-1], mean[-1], best, mean))
    runs.sort(key=lambda r: (r.profiles, r.repetition))
    return runs
