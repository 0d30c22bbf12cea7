"""Scene fitness functions.

A band scores a percentage with a Gaussian bump centred on the target whose
standard deviation is a sixth of the band width, clamped to 0 outside the
band.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .tagger import AVENGER, BAD_WARRIOR, DOWNTRODDEN, HELPLESS, WARRIOR, TagReport

SURVIVAL = "survival"


@dataclass(frozen=True)
class BandScore:
    target: float
    low: float
    high: float

    def __post_init__(self):
        if not self.low < self.target < self.high:
            raise ValueError(f"band needs low < target < high, got {self}")

    @property
    def sigma(self) -> float:
        return (self.high - self.low) / 6.0


def band_score(x: float, band: BandScore) -> float:
    if x < band.low or x > band.high:
        return 0.0
    d = x - band.target
    return math.exp(-d * d / (2.0 * band.sigma * band.sigma))


SURVIVAL_BAND = BandScore(60.0, 30.0, 90.0)
ARCHETYPE_BAND = BandScore(22.5, 8.0, 30.0)


@dataclass(frozen=True)
class SceneSpec:
    """A scene is either a sum of band scores (``kind="bands"``) or a count
    of agents carrying one archetype (``kind="count"``)."""

    name: str
    kind: str = "bands"
    components: tuple[tuple[str, BandScore], ...] = ()
    archetype: str | None = None
    denominator: str = "total_born"

    def __post_init__(self):
        if self.kind not in ("bands", "count"):
            raise ValueError(f"unknown scene kind {self.kind!r}")
        if self.kind == "count" and not self.archetype:
            raise ValueError("count scenes name an archetype")
        if self.kind == "bands" and not self.components:
            raise ValueError("band scenes need components")
        if self.denominator not in ("total_born", "alive_at_end"):
            raise ValueError(f"unknown denominator {self.denominator!r}")

    @property
    def archetypes(self) -> list[str]:
        if self.kind == "count":
            return [self.archetype]
        return [name for name, _ in self.components if name != SURVIVAL]

    @property
    def max_fitness(self) -> float:
        return float(len(self.components)) if self.kind == "bands" else math.inf

    def score(self, tags: TagReport) -> float:
        if self.kind == "count":
            return float(tags.count(self.archetype))
        if tags.total_born <= 0:
            raise ValueError("fitness needs at least one agent born")
        total = 0.0
        for name, band in self.components:
            if name == SURVIVAL:
                pct = 100.0 * tags.alive_at_end / tags.total_born
            else:
                pct = tags.percent(name, self.denominator)
            total += band_score(pct, band)
        return total

    def to_dict(self) -> dict:
        d = {"name": self.name, "kind": self.kind}
        if self.kind == "count":
            d["archetype"] = self.archetype
        else:
            d["components"] = [
                {"metric": n, "target": b.target, "low": b.low, "high": b.high} for n, b in self.components
            ]
            d["denominator"] = self.denominator
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SceneSpec":
        comps = tuple(
            (c["metric"], BandScore(c["target"], c["low"], c["high"])) for c in data.get("components", ())
        )
        return cls(
            name=data["name"],
            kind=data.get("kind", "bands"),
            components=comps,
            archetype=data.get("archetype"),
            denominator=data.get("denominator", "total_born"),
        )


NATALITY = SceneSpec(
    "natality_control",
    components=(
        (SURVIVAL, SURVIVAL_BAND),
        (DOWNTRODDEN, ARCHETYPE_BAND),
        (WARRIOR, ARCHETYPE_BAND),
        (HELPLESS, ARCHETYPE_BAND),
        (BAD_WARRIOR, ARCHETYPE_BAND),
    ),
)
REVENGE = SceneSpec("revenge", kind="count", archetype=AVENGER)
SCENES = {"natality": NATALITY, "natality_control": NATALITY, "revenge": REVENGE}


def fitness_natality(run, tags: TagReport) -> float:
    """Survival band plus one band per combat archetype, in [0, 5].

    Percentages are over ``run.total_born``.
    """
    if run.total_born <= 0:
        raise ValueError("fitness needs at least one agent born")
    if (tags.total_born, tags.alive_at_end) != (run.total_born, run.alive_at_end):
        raise ValueError("tag report does not belong to this run")
    return NATALITY.score(tags)


def fitness_revenge(tags: TagReport) -> int:
    return tags.count(AVENGER)


def get_scene(name_or_path: str) -> SceneSpec:
    if name_or_path in SCENES:
        return SCENES[name_or_path]
    path = Path(name_or_path)
    if path.exists():
        return SceneSpec.from_dict(json.loads(path.read_text(encoding="utf-8")))
    raise ValueError(f"unknown scene {name_or_path!r} (expected natality, revenge or a JSON file)")
