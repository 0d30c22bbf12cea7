import math
import random
from concurrent.futures import ThreadPoolExecutor

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dramasim.chronicle import Kind
from dramasim.evolver import Evaluator, GAConfig, GATrace, crossover, evaluate, evolve, mutate
from dramasim.fitness import NATALITY, REVENGE
from dramasim.profile import decode_profiles
from dramasim.rng import Stream, derive_seed
from dramasim.world import WorldConfig, run_world


def tiny(profiles=1, **kw):
    world = WorldConfig(duration_days=kw.pop("days", 40), profile_count=profiles)
    base = dict(population_size=6, generations=3, fitness_replicas=2, master_seed=1, world=world)
    base.update(kw)
    return GAConfig(**base)


def test_defaults_follow_table_values():
    cfg = GAConfig()
    assert (cfg.population_size, cfg.generations, cfg.fitness_replicas) == (30, 30, 10)
    assert cfg.crossover_rate == 0.35 and cfg.survivor_fraction == 0.9
    assert cfg.mutation_rate == pytest.approx(1 / 12)
    with pytest.raises(ValueError):
        GAConfig(crossover_rate=0.0)
    with pytest.raises(ValueError):
        GAConfig(fitness_replicas=0)


def test_crossover_single_point():
    a, b = (0.0,) * 5, (1.0,) * 5
    c1, c2 = crossover(a, b, 2)
    assert c1 == (0.0, 0.0, 1.0, 1.0, 1.0)
    assert c2 == (1.0, 1.0, 0.0, 0.0, 0.0)


def test_mutation_rate_expectation():
    rng = Stream(4)
    genome = (2.0,) * 60  # sentinel outside [0,1] marks untouched alleles
    changed = [sum(1 for x in mutate(genome, 1 / 12, rng) if x != 2.0) for _ in range(4000)]
    assert sum(changed) / len(changed) == pytest.approx(5.0, abs=0.15)


def test_evaluate_is_deterministic_and_validates():
    cfg = tiny(fitness_replicas=1)
    g = tuple([0.5] * 12)
    assert evaluate(g, cfg, 3) == evaluate(g, cfg, 3)
    with pytest.raises(ValueError):
        evaluate(g[:11], cfg)
    with pytest.raises(ValueError):
        evaluate((1.5,) + g[1:], cfg)


def test_evaluate_is_the_replica_mean():
    from dramasim.evolver import replica_score

    cfg = tiny(fitness_replicas=3)
    g = tuple(random.Random(2).random() for _ in range(12))
    parts = [replica_score(g, cfg.world, cfg.scene, derive_seed(cfg.master_seed, 7, r)) for r in range(3)]
    assert evaluate(g, cfg, 7) == pytest.approx(sum(parts) / 3, abs=1e-12)


def test_revenge_of_passive_genome_is_zero():
    cfg = tiny(scene=REVENGE, fitness_replicas=3, days=150)
    zero = (0.0,) * 12
    assert evaluate(zero, cfg) == 0.0
    run = run_world(cfg.world, decode_profiles(list(zero)), seed=5)
    assert not any(e.kind in (Kind.ATTACK_OK, Kind.ATTACK_FAIL) for c in run.chronicles.values() for e in c.events)


def test_evaluator_memoizes():
    ev = Evaluator(tiny())
    g = tuple([0.3] * 12)
    first = ev(g)
    assert ev.counter == 1
    assert ev(g) == first and ev.counter == 1


def test_executor_does_not_change_results():
    cfg = tiny(population_size=5, generations=2)
    with ThreadPoolExecutor(3) as pool:
        par = evolve(cfg, pool)
    seq = evolve(cfg)
    assert [r.fitnesses for r in par.records] == [r.fitnesses for r in seq.records]


random_configs = st.builds(
    lambda seed, n, gens, p, cx, surv, scene: tiny(
        profiles=p, population_size=n, generations=gens, crossover_rate=cx, survivor_fraction=surv,
        master_seed=seed, scene=scene, fitness_replicas=1, days=25,
    ),
    st.integers(min_value=0, max_value=2**64 - 1),
    st.integers(min_value=2, max_value=8),
    st.integers(min_value=0, max_value=4),
    st.integers(min_value=1, max_value=5),
    st.floats(min_value=0.05, max_value=1.0),
    st.floats(min_value=0.3, max_value=1.0),
    st.sampled_from([NATALITY, REVENGE]),
)


@settings(max_examples=20, deadline=None)
@given(random_configs)
def test_ga_invariants(cfg):
    trace = evolve(cfg)
    assert len(trace.records) == cfg.generations + 1
    bests = [r.best_fitness for r in trace.records]
    assert all(b2 >= b1 for b1, b2 in zip(bests, bests[1:]))
    for r in trace.records:
        assert len(r.population) == cfg.population_size
        assert all(len(g) == 12 * cfg.world.profile_count for g in r.population)
        assert all(0.0 <= a <= 1.0 for g in r.population for a in g)
        assert r.best_fitness == max(r.fitnesses)
        assert r.mean_fitness == pytest.approx(sum(r.fitnesses) / len(r.fitnesses))


def test_elite_is_carried_unchanged():
    cfg = tiny(population_size=10, generations=3)
    trace = evolve(cfg)
    for prev, cur in zip(trace.records, trace.records[1:]):
        assert prev.best_genome in cur.population


def test_reproducible_trace():
    a, b = evolve(tiny()), evolve(tiny())
    assert a.to_csv() == b.to_csv()
    assert a.best_genome == b.best_genome


def test_max_evaluations_cap_stops_early():
    trace = evolve(tiny(population_size=6, generations=10, max_evaluations=8))
    assert trace.records[-1].evaluations >= 8
    assert len(trace.records) < 11


def test_resample_mode_reevaluates_each_generation():
    cfg = tiny(population_size=4, generations=2, resample_each_generation=True)
    trace = evolve(cfg)
    # duplicates inside one generation share an evaluation
    assert trace.records[-1].evaluations == sum(len(set(r.population)) for r in trace.records)


def test_trace_files(tmp_path):
    trace = evolve(tiny())
    trace.write(tmp_path)
    lines = (tmp_path / "trace.csv").read_text().splitlines()
    assert lines[0] == "generation,best_fitness,mean_fitness"
    assert len(lines) == len(trace.records) + 1
    import json
    doc = json.loads((tmp_path / "best_genome.json").read_text())
    assert doc["genome"] == list(trace.best_genome)
    assert len(doc["profiles"]) == 1 and math.isclose(doc["best_fitness"], trace.best_fitness)
    assert isinstance(trace, GATrace)
