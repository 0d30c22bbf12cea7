"""Agent states, actions and the daily decision procedure.

An agent has no memory: each day it reads its current state and its
neighbourhood, draws from the world stream, and acts. ``live_one_day`` takes
the world as its service provider (grid, stream, agent table).
"""

from __future__ import annotations

from enum import Enum
from typing import TYPE_CHECKING

from .chronicle import Chronicle, Event, Kind, agent_ref
from .profile import METABOLISM_UNIT, Profile

if TYPE_CHECKING:
    from .world import World

COMBAT_ENERGY = METABOLISM_UNIT
NEWBORN_ENERGY_FRACTION = 0.5


class State(Enum):
    ALIVE_SATED = "alive"
    HUNGRY = "hungry"
    LOOKING_FOR_MATE = "looking_for_mate"
    PREGNANT = "pregnant"


class Outcome(Enum):
    SATISFACTORY = "satisfactory"
    UNSATISFACTORY = "unsatisfactory"
    DEFENDER_ESCAPED = "defender_escaped"


WON, LOST, ESCAPED = Outcome.SATISFACTORY, Outcome.UNSATISFACTORY, Outcome.DEFENDER_ESCAPED


_new_event = tuple.__new__  # skips NamedTuple argument handling on the hot path
_NO_ARGS: tuple[str, ...] = ()
_NOBODY = -1

K_MOVE, K_EAT, K_HUNGRY, K_SEEK = Kind.MOVE, Kind.EAT, Kind.HUNGRY, Kind.SEEK_MATE
K_MATE, K_PREGNANT, K_BIRTH, K_DIE = Kind.MATE, Kind.PREGNANT, Kind.BIRTH, Kind.DIE
K_OK, K_FAIL, K_ATTACKED = Kind.ATTACK_OK, Kind.ATTACK_FAIL, Kind.ATTACKED
K_DEFENDED, K_ESCAPED = Kind.DEFENDED, Kind.ESCAPED

SATED = State.ALIVE_SATED
HUNGRY = State.HUNGRY
LOOKING = State.LOOKING_FOR_MATE
PREGNANT = State.PREGNANT


class Agent:
    __slots__ = (
        "id", "ref", "ref_args", "profile", "profile_index", "cell", "energy", "age", "state",
        "gestation_remaining", "alive", "chronicle", "events", "parent",
    )

    def __init__(self, agent_id: int, profile_index: int, profile: Profile, cell: int,
                 energy: float, parent: int | None = None):
        self.id = agent_id
        self.ref = agent_ref(agent_id)
        self.ref_args = (self.ref,)
        self.profile = profile
        self.profile_index = profile_index
        self.cell = cell
        self.energy = energy
        self.age = 0
        self.state = SATED
        self.gestation_remaining = 0
        self.alive = True
        self.parent = parent
        self.chronicle = Chronicle(agent_id, profile_index)
        self.events = self.chronicle.events

    def log(self, day: int, kind: Kind, args: tuple[str, ...] = _NO_ARGS) -> None:
        self.events.append(_new_event(Event, (day, kind, args)))

    def __repr__(self) -> str:
        return f"Agent({self.ref}, cell={self.cell}, e={self.energy:.1f}, {self.state.name})"


def live_one_day(agent: Agent, world: "World") -> list[Event]:
    """Run one day of ``agent``'s life; returns the events it logged today.

    Events involving another agent are also appended to that agent's log.
    """
    events = agent.events
    start = len(events)
    _live(agent, world)
    return events[start:]


def _live(agent: Agent, world: "World") -> None:
    rng = world.rng
    prof = agent.profile

    state = agent.state
    if state is not PREGNANT:
        if agent.energy < prof.hunger_threshold * world.max_energy:
            new = HUNGRY
        elif rng.random() < prof.p_seek_mate:
            new = LOOKING
        else:
            new = SATED
        if new is not state:
            if new is HUNGRY:
                agent.events.append(_new_event(Event, (world.day, K_HUNGRY, _NO_ARGS)))
            elif new is LOOKING:
                agent.events.append(_new_event(Event, (world.day, K_SEEK, _NO_ARGS)))
            agent.state = state = new

    if state is HUNGRY or state is PREGNANT:
        _forage(agent, world)
    elif state is LOOKING:
        _court(agent, world)
    elif rng.random() < prof.p_move:
        _random_step(agent, world)

    if agent.alive and agent.state is PREGNANT:
        if agent.gestation_remaining > 0:
            agent.gestation_remaining -= 1
        if agent.gestation_remaining == 0:
            _give_birth(agent, world)

    if agent.alive:
        agent.energy -= prof.metabolism
        agent.age += 1
        if agent.energy <= 0:
            world.kill(agent, "starvation")
        elif agent.age > prof.max_age:
            world.kill(agent, "old_age")


def _forage(agent: Agent, world: "World") -> None:
    grid = world.grid
    cell = agent.cell
    if grid.rations[cell] > 0:
        world.eat(agent)
        return
    target = grid.nearest_ration(cell, agent.profile.vision)
    if target < 0:
        _random_step(agent, world)
        return
    nxt = grid.step_toward(cell, target)
    occupant = grid.occ[nxt]
    if occupant < 0:
        world.move(agent, nxt)
        return
    other = world.agents[occupant]
    if other.alive and world.rng.random() < agent.profile.p_attack:
        outcome = resolve_attack(agent, other, world)
        if outcome is not LOST and agent.alive and grid.occ[nxt] < 0:
            world.move(agent, nxt)
        return
    _random_step(agent, world)


def _court(agent: Agent, world: "World") -> None:
    grid = world.grid
    partner = None
    agents = world.agents
    occ = grid.occ
    ring = grid.ring(agent.cell, agent.profile.vision)
    for o in filter(_NOBODY.__lt__, map(occ.__getitem__, ring)):
        cand = agents[o]
        if cand.alive and cand.state is LOOKING:
            partner = cand
            break
    if partner is None:
        _random_step(agent, world)
        return
    if grid.adjacent(agent.cell, partner.cell):
        _mate(agent, partner, world)
        return
    nxt = grid.step_toward(agent.cell, partner.cell)
    if occ[nxt] < 0:
        world.move(agent, nxt)
    else:
        _random_step(agent, world)


def _mate(agent: Agent, partner: Agent, world: "World") -> None:
    day = world.day
    agent.log(day, K_MATE, partner.ref_args)
    partner.log(day, K_MATE, agent.ref_args)
    if world.rng.random() < agent.profile.fertility:
        agent.state = PREGNANT
        agent.gestation_remaining = agent.profile.gestation
        agent.log(day, K_PREGNANT)


def _give_birth(mother: Agent, world: "World") -> None:
    cost = NEWBORN_ENERGY_FRACTION * world.config.max_energy
    if mother.energy < cost:
        return
    spots = world.grid.free_neighbors(mother.cell)
    if not spots:
        return
    cell = world.rng.choice(spots)
    mother.energy -= cost
    child = world.spawn(cell, mother.profile_index, cost, parent=mother)
    mother.log(world.day, K_BIRTH, child.ref_args)
    mother.state = SATED


def _random_step(agent: Agent, world: "World") -> None:
    grid = world.grid
    occ = grid.occ
    spots = [n for n in grid._moore[agent.cell] if occ[n] < 0]
    if spots:
        world.move(agent, world.rng.choice(spots))


def resolve_attack(attacker: Agent, defender: Agent, world: "World") -> Outcome:
    """Attack an adjacent agent.

    The defender first tries to escape, then to defend; failing both, the
    contest is won by the attacker with probability s_a / (s_a + s_d).
    Both sides pay ``COMBAT_ENERGY``.
    """
    grid = world.grid
    if defender.cell not in grid._moore[attacker.cell]:
        raise ValueError(f"{attacker.ref} and {defender.ref} are not adjacent")
    rng = world.rng
    day = world.day
    dp = defender.profile

    a_log = attacker.events.append
    d_log = defender.events.append
    a_ref = attacker.ref_args
    d_ref = defender.ref_args
    outcome = None
    if rng.random() < dp.p_escape:
        spots = grid.free_neighbors(defender.cell)
        if spots:
            world.relocate(defender, rng.choice(spots))
            a_log(_new_event(Event, (day, K_OK, d_ref)))
            d_log(_new_event(Event, (day, K_ATTACKED, a_ref)))
            d_log(_new_event(Event, (day, K_ESCAPED, a_ref)))
            outcome = ESCAPED

    if outcome is None:
        if rng.random() < dp.p_defend:
            won = False
        else:
            sa = attacker.profile.attack_strength
            won = rng.random() < sa / (sa + dp.attack_strength)
        if won:
            spots = grid.free_neighbors(defender.cell)
            if spots:
                world.relocate(defender, rng.choice(spots))
            else:
                defender.energy -= COMBAT_ENERGY
            a_log(_new_event(Event, (day, K_OK, d_ref)))
            d_log(_new_event(Event, (day, K_ATTACKED, a_ref)))
            outcome = WON
        else:
            a_log(_new_event(Event, (day, K_FAIL, d_ref)))
            d_log(_new_event(Event, (day, K_ATTACKED, a_ref)))
            d_log(_new_event(Event, (day, K_DEFENDED, a_ref)))
            outcome = LOST

    attacker.energy -= COMBAT_ENERGY
    if attacker.energy <= 0:
        world.kill(attacker, "starvation")
    defender.energy -= COMBAT_ENERGY
    if defender.energy <= 0:
        world.kill(defender, "starvation")
    return outcome
