"""Genetic search over profile parameters.

Genomes are flat lists of ``12 * profile_count`` alleles in [0, 1]. A genome's
fitness is the mean scene score over ``fitness_replicas`` world runs whose
seeds derive from (master seed, evaluation counter, replica). Fitness is
memoized per genome, so a genome carried over unchanged keeps its score and
the best fitness of the trace never decreases.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import Executor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .fitness import NATALITY, SceneSpec
from .profile import ALLELES_PER_PROFILE, decode_profiles
from .rng import Stream, derive_seed
from .tagger import ArchetypeSpec, builtin_specs, tag_run
from .world import WorldConfig, run_world

GA_STREAM = 0x6761  # "ga"

Genome = tuple[float, ...]


@dataclass
class GAConfig:
    population_size: int = 30
    generations: int = 30
    crossover_rate: float = 0.35
    mutation_rate_denominator: float = 12.0
    survivor_fraction: float = 0.9
    elite_fraction: float = 0.1
    fitness_replicas: int = 10
    master_seed: int = 0
    scene: SceneSpec = NATALITY
    world: WorldConfig = field(default_factory=WorldConfig)
    resample_each_generation: bool = False
    max_evaluations: int | None = None

    def __post_init__(self):
        for name in ("crossover_rate", "survivor_fraction", "elite_fraction"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must be in (0, 1], got {v}")
        if self.mutation_rate_denominator < 1:
            raise ValueError("mutation_rate_denominator must be >= 1")
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.generations < 0 or self.fitness_replicas < 1:
            raise ValueError("generations must be >= 0 and fitness_replicas >= 1")

    @property
    def genome_length(self) -> int:
        return ALLELES_PER_PROFILE * self.world.profile_count

    @property
    def mutation_rate(self) -> float:
        return 1.0 / self.mutation_rate_denominator

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "population_size", "generations", "crossover_rate", "mutation_rate_denominator",
            "survivor_fraction", "elite_fraction", "fitness_replicas", "master_seed",
            "resample_each_generation", "max_evaluations",
        )}
        d["scene"] = self.scene.to_dict()
        d["world"] = self.world.to_dict()
        return d


def _specs_for(scene: SceneSpec, extra: Sequence[ArchetypeSpec] = ()) -> list[ArchetypeSpec]:
    available = {s.name: s for s in builtin_specs()}
    available.update({s.name: s for s in extra})
    missing = [n for n in scene.archetypes if n not in available]
    if missing:
        raise ValueError(f"scene {scene.name} needs unknown archetypes {missing}")
    return [available[n] for n in scene.archetypes]


def replica_score(genome: Sequence[float], world: WorldConfig, scene: SceneSpec, seed: int,
                  specs: Sequence[ArchetypeSpec] | None = None) -> float:
    run = run_world(world, decode_profiles(list(genome)), seed=seed)
    return scene.score(tag_run(run, specs if specs is not None else _specs_for(scene)))


def evaluate(genome: Sequence[float], cfg: GAConfig, eval_index: int = 0,
             specs: Sequence[ArchetypeSpec] | None = None) -> float:
    """Mean scene fitness over ``cfg.fitness_replicas`` seeded world runs."""
    if len(genome) != cfg.genome_length:
        raise ValueError(f"genome has {len(genome)} alleles, expected {cfg.genome_length}")
    if any(not 0.0 <= a <= 1.0 for a in genome):
        raise ValueError("alleles must lie in [0, 1]")
    specs = specs if specs is not None else _specs_for(cfg.scene)
    scores = [
        replica_score(genome, cfg.world, cfg.scene, derive_seed(cfg.master_seed, eval_index, r), specs)
        for r in range(cfg.fitness_replicas)
    ]
    return math.fsum(scores) / len(scores)


def _evaluate_task(args) -> float:
    genome, cfg, eval_index = args
    return evaluate(genome, cfg, eval_index)


class Evaluator:
    """Memoizing fitness evaluator.

    The evaluation counter is assigned in population order before any work
    is dispatched, so running through an executor gives the same numbers.
    """

    def __init__(self, cfg: GAConfig, executor: Executor | None = None):
        self.cfg = cfg
        self.executor = executor
        self.memo: dict[tuple, float] = {}
        self.counter = 0

    def _key(self, genome: Genome, generation: int) -> tuple:
        return (genome, generation if self.cfg.resample_each_generation else None)

    def __call__(self, genome: Genome, generation: int = 0) -> float:
        return self.evaluate_many([genome], generation)[0]

    def evaluate_many(self, genomes: Sequence[Genome], generation: int = 0) -> list[float]:
        pending: dict[tuple, int] = {}
        for g in genomes:
            key = self._key(g, generation)
            if key not in self.memo and key not in pending:
                pending[key] = self.counter
                self.counter += 1
        tasks = [(key[0], self.cfg, idx) for key, idx in pending.items()]
        if self.executor is not None and len(tasks) > 1:
            results = list(self.executor.map(_evaluate_task, tasks))
        else:
            results = [_evaluate_task(t) for t in tasks]
        for key, value in zip(pending, results):
            self.memo[key] = value
        return [self.memo[self._key(g, generation)] for g in genomes]


def crossover(a: Sequence[float], b: Sequence[float], cut: int) -> tuple[Genome, Genome]:
    """Single-point crossover: children swap tails at ``cut``."""
    return tuple(a[:cut]) + tuple(b[cut:]), tuple(b[:cut]) + tuple(a[cut:])


def mutate(genome: Sequence[float], rate: float, rng: Stream) -> Genome:
    """Resample each allele uniformly with probability ``rate``."""
    out = list(genome)
    for i in range(len(out)):
        if rng.random() < rate:
            out[i] = rng.random()
    return tuple(out)


@dataclass
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_genome: Genome
    population: list[Genome]
    fitnesses: list[float]
    evaluations: int


@dataclass
class GATrace:
    config: GAConfig
    records: list[GenerationRecord] = field(default_factory=list)

    @property
    def best_genome(self) -> Genome:
        return self.records[-1].best_genome

    @property
    def best_fitness(self) -> float:
        return self.records[-1].best_fitness

    @property
    def final_mean_fitness(self) -> float:
        return self.records[-1].mean_fitness

    def best_profiles(self):
        return decode_profiles(list(self.best_genome))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["generation", "best_fitness", "mean_fitness"])
        for r in self.records:
            w.writerow([r.generation, repr(r.best_fitness), repr(r.mean_fitness)])
        return buf.getvalue()

    def best_genome_doc(self) -> dict:
        return {
            "best_fitness": self.best_fitness,
            "genome": list(self.best_genome),
            "profiles": [p.as_dict() for p in self.best_profiles()],
            "ga": self.config.to_dict(),
        }

    def write(self, out_dir: Path | str) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "trace.csv").write_text(self.to_csv(), encoding="utf-8")
        (out_dir / "best_genome.json").write_text(
            json.dumps(self.best_genome_doc(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


def _ranked(fitnesses: Sequence[float]) -> list[int]:
    return sorted(range(len(fitnesses)), key=lambda i: (-fitnesses[i], i))


def evolve(cfg: GAConfig, executor: Executor | None = None) -> GATrace:
    """Generational GA with truncation survival and a carried elite."""
    rng = Stream(derive_seed(cfg.master_seed, GA_STREAM))
    evaluator = Evaluator(cfg, executor)
    n = cfg.population_size
    length = cfg.genome_length
    n_survivors = max(2, math.ceil(cfg.survivor_fraction * n))
    n_elite = min(n, math.ceil(cfg.elite_fraction * n))
    trace = GATrace(cfg)

    population = [tuple(rng.uniform_vector(length)) for _ in range(n)]
    for gen in range(cfg.generations + 1):
        fitnesses = evaluator.evaluate_many(population, gen)
        order = _ranked(fitnesses)
        trace.records.append(GenerationRecord(
            generation=gen,
            best_fitness=fitnesses[order[0]],
            mean_fitness=math.fsum(fitnesses) / n,
            best_genome=population[order[0]],
            population=list(population),
            fitnesses=list(fitnesses),
            evaluations=evaluator.counter,
        ))
        if gen == cfg.generations:
            break
        if cfg.max_evaluations is not None and evaluator.counter >= cfg.max_evaluations:
            break

        survivors = [population[i] for i in order[:n_survivors]]
        next_pop = [population[i] for i in order[:n_elite]]
        while len(next_pop) < n:
            a = survivors[rng.below(len(survivors))]
            b = survivors[rng.below(len(survivors))]
            if rng.random() < cfg.crossover_rate and length > 1:
                children = crossover(a, b, 1 + rng.below(length - 1))
            else:
                children = (a, b)
            for child in children:
                if len(next_pop) < n:
                    next_pop.append(mutate(child, cfg.mutation_rate, rng))
        population = next_pop
    return trace
