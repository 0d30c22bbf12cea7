"""Grid world: placement, day clock, rations and scheduling."""

from __future__ import annotations

import copy
import gc
import json
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache
from itertools import compress
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

from .agent import K_EAT, K_MOVE, NEWBORN_ENERGY_FRACTION, Agent, _live, _new_event
from .chronicle import LOG_FORMAT_VERSION, Chronicle, Event, Kind, write_log_dir
from .profile import Profile, decode_table
from .rng import Stream

Cell = tuple[int, int]


@dataclass
class WorldConfig:
    grid_dim: int = 10
    initial_agents: int = 15
    rations_per_day: int = 10
    duration_days: int = 1000
    profile_count: int = 1
    master_seed: int = 0
    ration_energy: float = 15.0
    max_energy: float = 100.0

    def __post_init__(self):
        if self.grid_dim < 1:
            raise ValueError("grid_dim must be positive")
        if self.initial_agents < 1:
            raise ValueError("initial_agents must be positive")
        if self.initial_agents > self.grid_dim ** 2:
            raise ValueError(
                f"{self.initial_agents} agents do not fit on a {self.grid_dim}x{self.grid_dim} grid"
            )
        if self.rations_per_day < 0:
            raise ValueError("rations_per_day must be non-negative")
        if self.duration_days < 0:
            raise ValueError("duration_days must be non-negative")
        if not 1 <= self.profile_count <= 5:
            raise ValueError("profile_count must be in [1, 5]")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.ration_energy <= 0 or self.max_energy <= 0:
            raise ValueError("energies must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "WorldConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known - {"format_version"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**{k: v for k, v in data.items() if k in known})

    @classmethod
    def from_json(cls, path: Path | str) -> "WorldConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        return asdict(self)


@lru_cache(maxsize=None)
def _rings(dim: int, radius: int) -> tuple[tuple[int, ...], ...]:
    """Per cell, the cells within Chebyshev ``radius`` ordered by distance then index."""
    out = []
    for c in range(dim * dim):
        x, y = c % dim, c // dim
        cells = []
        for ny in range(max(0, y - radius), min(dim, y + radius + 1)):
            for nx in range(max(0, x - radius), min(dim, x + radius + 1)):
                if nx != x or ny != y:
                    cells.append((max(abs(nx - x), abs(ny - y)), ny * dim + nx))
        out.append(tuple(c2 for _, c2 in sorted(cells)))
    return tuple(out)


class Grid:
    """Square grid. Cells are flat indices ``y * dim + x`` internally."""

    def __init__(self, dim: int):
        self.dim = dim
        self.size = dim * dim
        self.occ = [-1] * self.size
        self.rations = [0] * self.size
        self._moore = _rings(dim, 1)
        self.atoms = [f"{c % dim}:{c // dim}" for c in range(self.size)]
        self.move_args = [(atom,) for atom in self.atoms]

    def xy(self, c: int) -> Cell:
        return c % self.dim, c // self.dim

    def index(self, cell: Cell) -> int:
        x, y = cell
        if not (0 <= x < self.dim and 0 <= y < self.dim):
            raise ValueError(f"cell {cell} outside {self.dim}x{self.dim} grid")
        return y * self.dim + x

    def chebyshev(self, a: int, b: int) -> int:
        d = self.dim
        return max(abs(a % d - b % d), abs(a // d - b // d))

    def ring(self, c: int, radius: int) -> tuple[int, ...]:
        return _rings(self.dim, radius)[c]

    def free_neighbors(self, c: int) -> list[int]:
        occ = self.occ
        return [n for n in self._moore[c] if occ[n] < 0]

    def nearest_ration(self, c: int, radius: int) -> int:
        ring = _rings(self.dim, radius)[c]
        return next(compress(ring, map(self.rations.__getitem__, ring)), -1)

    def adjacent(self, a: int, b: int) -> bool:
        return b in self._moore[a]

    def step_toward(self, c: int, target: int) -> int:
        d = self.dim
        x, y = c % d, c // d
        tx, ty = target % d, target // d
        x += (tx > x) - (tx < x)
        y += (ty > y) - (ty < y)
        return y * d + x


class Survey(NamedTuple):
    free: list[Cell]
    rations: dict[Cell, int]
    occupied: dict[Cell, int]


class World:
    def __init__(self, config: WorldConfig, profiles: Sequence[Profile], seed: int | None = None):
        self.config = config
        self.max_energy = config.max_energy
        self.ration_energy = config.ration_energy
        self.profiles = list(profiles)
        self.rng = Stream(config.master_seed if seed is None else seed)
        self.grid = Grid(config.grid_dim)
        self.agents: dict[int, Agent] = {}
        self.chronicles: dict[int, Chronicle] = {}
        self.parents: dict[int, int | None] = {}
        self.next_id = 0
        self.day = 0
        self.rations_added = 0
        self.rations_eaten = 0
        self.last_order: list[int] = []

    # services used by agents

    def spawn(self, cell: int, profile_index: int, energy: float, parent: Agent | None = None) -> Agent:
        aid = self.next_id
        self.next_id += 1
        agent = Agent(aid, profile_index, self.profiles[profile_index], cell, energy,
                      None if parent is None else parent.id)
        self.grid.occ[cell] = aid
        self.agents[aid] = agent
        self.chronicles[aid] = agent.chronicle
        self.parents[aid] = agent.parent
        agent.log(self.day, Kind.BORN, () if parent is None else (parent.ref,))
        return agent

    def relocate(self, agent: Agent, cell: int) -> None:
        occ = self.grid.occ
        occ[agent.cell] = -1
        occ[cell] = agent.id
        agent.cell = cell

    def move(self, agent: Agent, cell: int) -> None:
        occ = self.grid.occ
        occ[agent.cell] = -1
        occ[cell] = agent.id
        agent.cell = cell
        agent.events.append(_new_event(Event, (self.day, K_MOVE, self.grid.move_args[cell])))

    def eat(self, agent: Agent) -> None:
        self.grid.rations[agent.cell] -= 1
        self.rations_eaten += 1
        agent.energy = min(self.max_energy, agent.energy + self.ration_energy)
        agent.events.append(_new_event(Event, (self.day, K_EAT, ())))

    def kill(self, agent: Agent, cause: str) -> None:
        # the body keeps its cell until the end-of-day sweep
        agent.alive = False
        agent.energy = max(agent.energy, 0.0)
        agent.log(self.day, Kind.DIE, (cause,))

    def neighborhood(self, cell: Cell, radius: int) -> Survey:
        return neighborhood_query(self, cell, radius)

    @property
    def alive_count(self) -> int:
        return sum(1 for a in self.agents.values() if a.alive)

    def snapshot(self) -> "World":
        return copy.deepcopy(self)

    def check_invariants(self) -> list[str]:
        problems = []
        seen = {}
        for c, aid in enumerate(self.grid.occ):
            if aid >= 0:
                if aid in seen:
                    problems.append(f"A{aid} occupies two cells")
                seen[aid] = c
        for aid, agent in self.agents.items():
            if seen.get(aid) != agent.cell:
                problems.append(f"A{aid} not on its cell {agent.cell}")
            if not 0 <= agent.energy <= self.config.max_energy:
                problems.append(f"A{aid} energy {agent.energy} out of bounds")
        if len(seen) != len(self.agents):
            problems.append("grid holds agents missing from the agent table")
        return problems


def init_world(config: WorldConfig, profiles: Sequence[Profile], seed: int | None = None) -> World:
    if len(profiles) != config.profile_count:
        raise ValueError(f"expected {config.profile_count} profiles, got {len(profiles)}")
    world = World(config, profiles, seed)
    free = list(range(world.grid.size))
    energy = NEWBORN_ENERGY_FRACTION * config.max_energy
    for i in range(config.initial_agents):
        j = world.rng.below(len(free))
        free[j], free[-1] = free[-1], free[j]
        world.spawn(free.pop(), i % config.profile_count, energy)
    return world


def step_day(world: World, observer: Callable[[World, Agent], None] | None = None) -> World:
    """Advance one day. ``observer`` is called after every agent's turn."""
    cfg = world.config
    if world.day >= cfg.duration_days:
        return world
    grid = world.grid
    rng = world.rng
    rations = grid.rations
    for c in rng.below_many(grid.size, cfg.rations_per_day):
        rations[c] += 1
    world.rations_added += cfg.rations_per_day

    # ids are assigned in increasing order, so the table's insertion order is sorted
    order = [aid for aid, a in world.agents.items() if a.alive]
    rng.shuffle(order)
    world.last_order = order
    agents = world.agents
    if observer is None:
        for aid in order:
            agent = agents[aid]
            if agent.alive:
                _live(agent, world)
    else:
        for aid in order:
            agent = agents[aid]
            if agent.alive:
                _live(agent, world)
                observer(world, agent)

    for aid in [aid for aid, a in agents.items() if not a.alive]:
        grid.occ[agents.pop(aid).cell] = -1
    world.day += 1
    return world


def neighborhood_query(world: World, cell: Cell, radius: int) -> Survey:
    """Classify every cell within Chebyshev ``radius`` of ``cell`` (centre excluded)."""
    if radius < 1:
        raise ValueError("radius must be at least 1")
    grid = world.grid
    c = grid.index(cell)
    free, rations, occupied = [], {}, {}
    for n in grid.ring(c, radius):
        xy = grid.xy(n)
        if grid.occ[n] >= 0:
            occupied[xy] = grid.occ[n]
        else:
            free.append(xy)
        if grid.rations[n]:
            rations[xy] = grid.rations[n]
    return Survey(free, rations, occupied)


@dataclass
class WorldRun:
    config: WorldConfig
    profiles: list[Profile]
    chronicles: dict[int, Chronicle]
    parents: dict[int, int | None] = field(default_factory=dict)
    total_born: int = 0
    alive_at_end: int = 0
    final_day: int = 0

    def summary(self) -> dict:
        per_profile = {}
        for p in range(len(self.profiles)):
            born = [c for c in self.chronicles.values() if c.profile_index == p]
            per_profile[str(p)] = {"born": len(born), "alive": sum(1 for c in born if not c.dead)}
        return {
            "format_version": LOG_FORMAT_VERSION,
            "config": self.config.to_dict(),
            "total_born": self.total_born,
            "alive_at_end": self.alive_at_end,
            "final_day": self.final_day,
            "per_profile": per_profile,
            "profiles": [p.as_dict() for p in self.profiles],
            "decode_table": decode_table(),
            "agents": {
                f"A{aid}": {
                    "profile": c.profile_index,
                    "parent": None if self.parents.get(aid) is None else f"A{self.parents[aid]}",
                }
                for aid, c in self.chronicles.items()
            },
        }

    def write(self, out_dir: Path | str) -> Path:
        out_dir = Path(out_dir)
        write_log_dir(self.chronicles.values(), out_dir)
        (out_dir / "run.json").write_text(
            json.dumps(self.summary(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        return out_dir


def run_world(config: WorldConfig, profiles: Sequence[Profile], seed: int | None = None) -> WorldRun:
    """Simulate ``config.duration_days`` days.

    ``seed`` overrides ``config.master_seed`` (used for replica runs).
    """
    world = init_world(config, profiles, seed)
    # Events are small acyclic tuples; cyclic collection passes over them are pure overhead.
    collecting = gc.isenabled()
    gc.disable()
    try:
        while world.day < config.duration_days:
            step_day(world)
    finally:
        if collecting:
            gc.enable()
    return WorldRun(
        config=config,
        profiles=list(profiles),
        chronicles=world.chronicles,
        parents=world.parents,
        total_born=world.next_id,
        alive_at_end=world.alive_count,
        final_day=world.day,
    )
