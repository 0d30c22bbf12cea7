import random
from dataclasses import replace

import pytest

from dramasim.chronicle import Chronicle, Event, Kind
from dramasim.profile import ALLELES_PER_PROFILE, Profile
from dramasim.world import WorldConfig


def make_profile(**traits) -> Profile:
    """Decode all-0.5 alleles, then override decoded traits."""
    return replace(Profile.decode([0.5] * ALLELES_PER_PROFILE), **traits)


def random_genome(rng: random.Random, profiles: int) -> list[float]:
    return [rng.random() for _ in range(ALLELES_PER_PROFILE * profiles)]


_COMBAT = [Kind.ATTACKED, Kind.DEFENDED, Kind.ATTACK_OK, Kind.ATTACK_FAIL, Kind.ESCAPED]
_OTHER = [Kind.MOVE, Kind.EAT, Kind.HUNGRY, Kind.SEEK_MATE, Kind.MATE, Kind.PREGNANT, Kind.BIRTH]
# ids chosen so prefixes collide: A7 / A71 / A710, A1 / A17
TRAP_IDS = [1, 7, 17, 71, 710, 3]


def random_chronicle(rng: random.Random, agent_id: int = 0, max_events: int = 40) -> Chronicle:
    chron = Chronicle(agent_id, 0, [Event(0, Kind.BORN, ())])
    day = 0
    for _ in range(rng.randrange(max_events)):
        day += rng.randrange(3)
        if rng.random() < 0.75:
            kind = rng.choice(_COMBAT)
        else:
            kind = rng.choice(_OTHER)
        if kind in (Kind.MOVE,):
            args = (f"{rng.randrange(10)}:{rng.randrange(10)}",)
        elif kind in (Kind.EAT, Kind.HUNGRY, Kind.SEEK_MATE, Kind.PREGNANT):
            args = ()
        else:
            args = (f"A{rng.choice(TRAP_IDS)}",)
        chron.events.append(Event(day, kind, args))
    if rng.random() < 0.3:
        chron.events.append(Event(day, Kind.DIE, (rng.choice(["starvation", "old_age"]),)))
    return chron


@pytest.fixture
def small_world_config():
    return WorldConfig(duration_days=60)


# acceptance criteria report one line each, repeated in the terminal summary
CRITERIA_LINES: list[str] = []


def report_criterion(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    CRITERIA_LINES.append(line)
    print(line, flush=True)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_LINES):
            terminalreporter.write_line(line)
