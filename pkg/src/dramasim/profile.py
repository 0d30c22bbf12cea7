"""Twelve-allele personality profiles.

Alleles are reals in [0, 1]; ``decode`` maps them onto agent traits. The table
below is the published decode (see docs/profile_decode.md) and is written into
every run summary so logs stay interpretable.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

ALLELES_PER_PROFILE = 12
DECODE_VERSION = 1

# energy units per day; combat costs one unit
METABOLISM_UNIT = 2.0
METABOLISM_SPAN = (1.0, 3.0)  # in units
VISION_RANGE = (1, 3)
GESTATION_RANGE = (5, 30)
MAX_AGE_RANGE = (100, 1000)
MIN_STRENGTH = 0.01

DECODE_TABLE = [
    ("p_move", "probability of a one-cell random walk when sated", "identity"),
    ("vision", "vision radius in cells", "1 + min(2, floor(3a))"),
    ("metabolism", "energy burnt per day", "2 * (1 + 2a)"),
    ("hunger_threshold", "fraction of max energy below which the agent is hungry", "identity"),
    ("p_attack", "probability of attacking an agent blocking the way to food", "identity"),
    ("p_defend", "probability of holding the position when attacked", "identity"),
    ("p_escape", "probability of fleeing an attack", "identity"),
    ("attack_strength", "weight in contest resolution", "max(a, 0.01)"),
    ("p_seek_mate", "probability of looking for a mate when sated", "identity"),
    ("fertility", "probability that a mating causes pregnancy", "identity"),
    ("gestation", "gestation length in days", "5 + round(25a)"),
    ("max_age", "age in days after which the agent dies", "100 + round(900a)"),
]


def _clamp(a: float) -> float:
    return 0.0 if a < 0.0 else 1.0 if a > 1.0 else float(a)


@dataclass(frozen=True)
class Profile:
    p_move: float
    vision: int
    metabolism: float
    hunger_threshold: float
    p_attack: float
    p_defend: float
    p_escape: float
    attack_strength: float
    p_seek_mate: float
    fertility: float
    gestation: int
    max_age: int
    alleles: tuple[float, ...] = ()

    @classmethod
    def decode(cls, alleles: Sequence[float]) -> "Profile":
        if len(alleles) != ALLELES_PER_PROFILE:
            raise ValueError(f"a profile needs {ALLELES_PER_PROFILE} alleles, got {len(alleles)}")
        a = [_clamp(x) for x in alleles]
        lo, hi = METABOLISM_SPAN
        return cls(
            p_move=a[0],
            vision=VISION_RANGE[0] + min(VISION_RANGE[1] - VISION_RANGE[0], int(a[1] * 3)),
            metabolism=METABOLISM_UNIT * (lo + (hi - lo) * a[2]),
            hunger_threshold=a[3],
            p_attack=a[4],
            p_defend=a[5],
            p_escape=a[6],
            attack_strength=max(a[7], MIN_STRENGTH),
            p_seek_mate=a[8],
            fertility=a[9],
            gestation=GESTATION_RANGE[0] + round((GESTATION_RANGE[1] - GESTATION_RANGE[0]) * a[10]),
            max_age=MAX_AGE_RANGE[0] + round((MAX_AGE_RANGE[1] - MAX_AGE_RANGE[0]) * a[11]),
            alleles=tuple(a),
        )

    def as_dict(self) -> dict:
        d = asdict(self)
        d["alleles"] = list(self.alleles)
        return d


def decode_profiles(alleles: Sequence[float]) -> list[Profile]:
    """Split a genome into consecutive 12-allele profiles."""
    n = ALLELES_PER_PROFILE
    if len(alleles) % n or not alleles:
        raise ValueError(f"genome length {len(alleles)} is not a positive multiple of {n}")
    return [Profile.decode(alleles[i:i + n]) for i in range(0, len(alleles), n)]


def decode_table() -> dict:
    return {
        "version": DECODE_VERSION,
        "metabolism_unit": METABOLISM_UNIT,
        "alleles": [
            {"index": i, "trait": name, "meaning": meaning, "scaling": scaling}
            for i, (name, meaning, scaling) in enumerate(DECODE_TABLE)
        ],
    }
