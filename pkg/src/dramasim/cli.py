"""Command line entry point.

    dramasim simulate   --config world.json --seed 42 --out runs/a
    dramasim tag        runs/a [--specs archetypes.json] [--check-oracle]
    dramasim evolve     --scene revenge --profiles 1 --seed 7 --out ga/
    dramasim experiment --scene natality --profiles 1,2,3,4,5 --out exp/
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from .chronicle import read_log_dir
from .evolver import GAConfig, evolve
from .experiment import DESK_SCALE, PAPER_SCALE, ExperimentConfig, run_experiment
from .fitness import get_scene
from .profile import ALLELES_PER_PROFILE, decode_profiles
from .tagger import builtin_specs, load_specs, oracle_disagreements, tag_chronicles
from .world import WorldConfig, run_world

log = logging.getLogger("dramasim")


def _parse_profiles(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad profile list {text!r}") from None
    if not values or any(not 1 <= v <= 5 for v in values):
        raise argparse.ArgumentTypeError("profile counts must be in 1..5")
    return values


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _load_simulation_config(path: str | None) -> tuple[WorldConfig, list[float] | None]:
    """A world config file is either a flat WorldConfig object or
    ``{"world": {...}, "genome": [...]}``."""
    if path is None:
        return WorldConfig(), None
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if "world" in data or "genome" in data:
        return WorldConfig.from_dict(data.get("world", {})), data.get("genome")
    return WorldConfig.from_dict(data), None


def cmd_simulate(args) -> int:
    world, genome = _load_simulation_config(args.config)
    if args.genome:
        doc = json.loads(Path(args.genome).read_text(encoding="utf-8"))
        genome = doc["genome"] if isinstance(doc, dict) else doc
    if args.seed is not None:
        world.master_seed = args.seed
    if genome is None:
        genome = [0.5] * (ALLELES_PER_PROFILE * world.profile_count)
    profiles = decode_profiles(genome)
    if len(profiles) != world.profile_count:
        world = replace(world, profile_count=len(profiles))
    run = run_world(world, profiles)
    run.write(args.out)
    print(f"total_born={run.total_born} alive_at_end={run.alive_at_end} days={run.final_day} out={args.out}")
    return 0


def cmd_tag(args) -> int:
    log_dir = Path(args.log_dir)
    if not log_dir.is_dir():
        print(f"error: {log_dir} is not a directory", file=sys.stderr)
        return 2
    chronicles, summary, errors = read_log_dir(log_dir)
    for err in errors:
        print(f"warning: skipped {err}", file=sys.stderr)
    specs = load_specs(args.specs) if args.specs else builtin_specs()
    total = summary["total_born"] if summary else len(chronicles)
    alive = summary["alive_at_end"] if summary else None
    report = tag_chronicles(chronicles, specs, total, alive)
    for name, msg in report.errors.items():
        print(f"warning: archetype {name} skipped: {msg}", file=sys.stderr)

    out = Path(args.out) if args.out else log_dir
    out.mkdir(parents=True, exist_ok=True)
    (out / "tags.json").write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out / "tags.csv").write_text(report.to_csv(args.denominator), encoding="utf-8")
    for name in report.tags:
        print(f"{name}: {report.count(name)} ({report.percent(name, args.denominator):.2f}%)")

    if args.check_oracle:
        bad = oracle_disagreements(chronicles.values(), report)
        for name, aid in bad:
            print(f"oracle disagreement: {name} on A{aid}", file=sys.stderr)
        if bad:
            return 1
        print("oracle check: all tags agree")
    return 0


def _ga_config(args, profiles: int, seed: int) -> GAConfig:
    scale = PAPER_SCALE if args.paper_scale else DESK_SCALE
    world = WorldConfig.from_json(args.config) if args.config else WorldConfig()
    world.duration_days = args.days if args.days is not None else scale["duration_days"]
    world.profile_count = profiles
    return GAConfig(
        population_size=args.population or scale["population_size"],
        generations=args.generations if args.generations is not None else scale["generations"],
        fitness_replicas=args.replicas or scale["fitness_replicas"],
        master_seed=seed,
        scene=get_scene(args.scene),
        world=world,
    )


def cmd_evolve(args) -> int:
    from .plotting import plot_trace

    profiles = args.profiles[0]
    cfg = _ga_config(args, profiles, args.seed)
    executor = ProcessPoolExecutor(args.jobs) if args.jobs > 1 else None
    try:
        trace = evolve(cfg, executor)
    finally:
        if executor is not None:
            executor.shutdown()
    out = Path(args.out)
    trace.write(out)
    plot_trace(trace, out / "figures" / "trace.png", f"{cfg.scene.name}, {profiles} profile(s)")
    for r in trace.records:
        print(f"gen {r.generation:3d}  best {r.best_fitness:.4f}  mean {r.mean_fitness:.4f}")
    return 0


def cmd_experiment(args) -> int:
    if args.experiment_config:
        cfg = ExperimentConfig.from_json(args.experiment_config)
    else:
        builder = ExperimentConfig.paper if args.paper_scale else ExperimentConfig.desk
        ga = {}
        if args.generations is not None:
            ga["generations"] = args.generations
        if args.population:
            ga["population_size"] = args.population
        if args.replicas:
            ga["fitness_replicas"] = args.replicas
        world = WorldConfig.from_json(args.config).to_dict() if args.config else {}
        world.pop("profile_count", None)
        world.pop("master_seed", None)
        if args.days is not None:
            world["duration_days"] = args.days
        kw = {"scene": args.scene, "profile_counts": args.profiles, "master_seed": args.seed,
              "ga": ga, "world": world}
        if args.repetitions:
            kw["repetitions"] = args.repetitions
        cfg = builder(**kw)
    cfg.out_dir = args.out

    def progress(run):
        print(f"P={run.profiles} rep={run.repetition} best={run.best_fitness:.4f} "
              f"mean={run.final_mean_fitness:.4f}", flush=True)

    executor = ProcessPoolExecutor(args.jobs) if args.jobs > 1 else None
    try:
        result = run_experiment(cfg, executor, progress)
    finally:
        if executor is not None:
            executor.shutdown()
    print(result.summary_csv(), end="")
    return 1 if result.failures and not result.runs else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dramasim", description=__doc__.splitlines()[0] if __doc__ else None)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one world and write its logs")
    p.add_argument("--config", help="world config JSON")
    p.add_argument("--genome", help="genome JSON (e.g. best_genome.json from evolve)")
    p.add_argument("--seed", type=_u64)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tag", help="tag a log directory with archetypes")
    p.add_argument("log_dir")
    p.add_argument("--specs", help="custom archetypes JSON")
    p.add_argument("--out", help="output directory (default: the log directory)")
    p.add_argument("--check-oracle", action="store_true", help="fail on any pattern/oracle disagreement")
    p.add_argument("--denominator", choices=["total_born", "alive_at_end"], default="total_born")
    p.set_defaults(func=cmd_tag)

    for name, func, helptext in (
        ("evolve", cmd_evolve, "run one GA"),
        ("experiment", cmd_experiment, "sweep profile counts with repeated GA runs"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--scene", default="natality", help="natality, revenge or a scene JSON file")
        p.add_argument("--profiles", type=_parse_profiles, default=[1] if name == "evolve" else [1, 2, 3, 4, 5])
        p.add_argument("--seed", type=_u64, default=0)
        p.add_argument("--out", required=True)
        p.add_argument("--config", help="world config JSON")
        p.add_argument("--paper-scale", action="store_true")
        p.add_argument("--generations", type=int)
        p.add_argument("--population", type=int)
        p.add_argument("--replicas", type=int)
        p.add_argument("--days", type=int)
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        if name == "experiment":
            p.add_argument("--repetitions", type=int)
            p.add_argument("--experiment-config", help="ExperimentConfig JSON")
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
