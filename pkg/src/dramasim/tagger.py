"""Archetype tagging of rendered life logs.

An archetype is a backreference-capable pattern matched against the whole
rendered log, plus an optional forbidden pattern that must not match. The
five builtin archetypes also have a counting oracle over the structured
events, used to cross-check the patterns and as the fallback when a match
exceeds its time budget.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

import regex

from .chronicle import Chronicle, Kind, render_log

log = logging.getLogger(__name__)

MATCH_TIMEOUT = 0.010  # seconds per agent and pattern

DOWNTRODDEN = "downtrodden"
WARRIOR = "warrior"
HELPLESS = "helpless"
BAD_WARRIOR = "bad_warrior"
AVENGER = "avenger"
COMBAT_ARCHETYPES = (DOWNTRODDEN, WARRIOR, HELPLESS, BAD_WARRIOR)


def _at_least(kind: str, n: int, prefix: str = "") -> str:
    # each atomic non-greedy gap stops at the next `|kind|` and never
    # backtracks, so a failing match costs one pass over the text
    return rf"\A{prefix}(?>.*?\|{kind}\|){{{n}}}"


@dataclass
class ArchetypeSpec:
    name: str
    pattern: str
    forbidden_pattern: str | None = None
    description: str = ""
    _compiled: tuple = field(default=None, init=False, repr=False, compare=False)

    def compile(self):
        if self._compiled is None:
            flags = regex.MULTILINE | regex.DOTALL | regex.VERSION0
            forbidden = regex.compile(self.forbidden_pattern, flags) if self.forbidden_pattern else None
            self._compiled = (regex.compile(self.pattern, flags), forbidden)
        return self._compiled

    def matches(self, text: str, timeout: float | None = MATCH_TIMEOUT) -> bool:
        """True when ``pattern`` matches and ``forbidden_pattern`` does not.

        Raises TimeoutError when either search exceeds ``timeout``.
        """
        pattern, forbidden = self.compile()
        if pattern.search(text, timeout=timeout) is None:
            return False
        return forbidden is None or forbidden.search(text, timeout=timeout) is None

    def to_dict(self) -> dict:
        d = {"name": self.name, "pattern": self.pattern}
        if self.forbidden_pattern:
            d["forbidden_pattern"] = self.forbidden_pattern
        if self.description:
            d["description"] = self.description
        return d


def builtin_specs() -> list[ArchetypeSpec]:
    return [
        ArchetypeSpec(
            DOWNTRODDEN,
            _at_least("ATTACKED", 2, prefix=r"(?=.*?\|DEFENDED\|)"),
            description="attacked at least twice and defended its position at least once",
        ),
        ArchetypeSpec(
            WARRIOR,
            _at_least("ATTACK_OK", 5),
            description="at least five satisfactory attacks",
        ),
        ArchetypeSpec(
            HELPLESS,
            _at_least("ATTACKED", 10),
            forbidden_pattern=r"\|DEFENDED\|",
            description="attacked at least ten times and never defended",
        ),
        ArchetypeSpec(
            BAD_WARRIOR,
            _at_least("ATTACK_FAIL", 10),
            description="at least ten unsatisfactory attacks",
        ),
        ArchetypeSpec(
            AVENGER,
            r"\|ATTACKED\|(A\d+)\b.*\|ATTACK_OK\|\1\b",
            description="attacked by some agent b, later attacked b satisfactorily",
        ),
    ]


def builtin_spec(name: str) -> ArchetypeSpec:
    for spec in builtin_specs():
        if spec.name == name:
            return spec
    raise KeyError(f"unknown builtin archetype {name!r}")


def _count(chron: Chronicle, kind: Kind) -> int:
    return sum(1 for e in chron.events if e.kind is kind)


def _is_avenger(chron: Chronicle) -> bool:
    events = chron.events
    for i, e in enumerate(events):
        if e.kind is Kind.ATTACKED:
            b = e.args[0]
            for later in events[i + 1:]:
                if later.kind is Kind.ATTACK_OK and later.args[0] == b:
                    return True
    return False


_BUILTIN_PATTERNS = {}
for _s in builtin_specs():
    _BUILTIN_PATTERNS.setdefault(_s.pattern, set()).add(_s.name)

ORACLES: dict[str, Callable[[Chronicle], bool]] = {
    DOWNTRODDEN: lambda c: _count(c, Kind.ATTACKED) >= 2 and _count(c, Kind.DEFENDED) >= 1,
    WARRIOR: lambda c: _count(c, Kind.ATTACK_OK) >= 5,
    HELPLESS: lambda c: _count(c, Kind.ATTACKED) >= 10 and _count(c, Kind.DEFENDED) == 0,
    BAD_WARRIOR: lambda c: _count(c, Kind.ATTACK_FAIL) >= 10,
    AVENGER: _is_avenger,
}


def oracle_tag(chronicle: Chronicle, spec_name: str) -> bool:
    """Evaluate a builtin archetype by counting events, without text matching."""
    try:
        return ORACLES[spec_name](chronicle)
    except KeyError:
        raise KeyError(f"no oracle for archetype {spec_name!r}") from None


@dataclass
class TagReport:
    tags: dict[str, set[int]]
    total_born: int
    alive_at_end: int
    errors: dict[str, str] = field(default_factory=dict)
    timeouts: int = 0

    def count(self, name: str) -> int:
        return len(self.tags.get(name, ()))

    def percent(self, name: str, denominator: str = "total_born") -> float:
        denom = self.total_born if denominator == "total_born" else self.alive_at_end
        return 100.0 * self.count(name) / denom if denom else 0.0

    def to_dict(self) -> dict:
        return {
            "total_born": self.total_born,
            "alive_at_end": self.alive_at_end,
            "tags": {name: [f"A{a}" for a in sorted(ids)] for name, ids in self.tags.items()},
            "counts": {name: len(ids) for name, ids in self.tags.items()},
            "errors": dict(self.errors),
            "timeouts": self.timeouts,
        }

    def to_csv(self, denominator: str = "total_born") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["archetype", "count", f"percent_of_{denominator}"])
        for name in self.tags:
            w.writerow([name, self.count(name), f"{self.percent(name, denominator):.4f}"])
        return buf.getvalue()


def tag_chronicles(
    chronicles: Mapping[int, Chronicle] | Iterable[Chronicle],
    specs: Iterable[ArchetypeSpec],
    total_born: int | None = None,
    alive_at_end: int | None = None,
) -> TagReport:
    """Tag every chronicle with every spec it matches.

    A spec whose pattern does not compile is recorded in ``errors`` and
    skipped. A builtin archetype whose match times out falls back to its
    oracle; a custom one is left untagged and counted in ``timeouts``.
    """
    if isinstance(chronicles, Mapping):
        chronicles = list(chronicles.values())
    else:
        chronicles = list(chronicles)
    specs = list(specs)
    report = TagReport(
        tags={},
        total_born=len(chronicles) if total_born is None else total_born,
        alive_at_end=sum(1 for c in chronicles if not c.dead) if alive_at_end is None else alive_at_end,
    )
    usable = []
    for spec in specs:
        try:
            spec.compile()
        except regex.error as exc:
            report.errors[spec.name] = str(exc)
            log.warning("archetype %s does not compile: %s", spec.name, exc)
            continue
        report.tags[spec.name] = set()
        usable.append(spec)

    for chron in chronicles:
        text = render_log(chron)
        for spec in usable:
            try:
                hit = spec.matches(text)
            except TimeoutError:
                report.timeouts += 1
                hit = ORACLES[spec.name](chron) if spec.name in _BUILTIN_PATTERNS.get(spec.pattern, ()) else False
            if hit:
                report.tags[spec.name].add(chron.agent_id)
    return report


def tag_run(run, specs: Iterable[ArchetypeSpec]) -> TagReport:
    return tag_chronicles(run.chronicles, specs, run.total_born, run.alive_at_end)


def load_specs(path: Path | str) -> list[ArchetypeSpec]:
    """Read ``[{name, pattern, forbidden_pattern?, description?}, ...]``."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        data = data.get("archetypes", [])
    specs = []
    for item in data:
        if "name" not in item or "pattern" not in item:
            raise ValueError(f"archetype entry needs name and pattern: {item!r}")
        specs.append(ArchetypeSpec(
            item["name"], item["pattern"], item.get("forbidden_pattern"), item.get("description", ""),
        ))
    return specs


def oracle_disagreements(chronicles: Iterable[Chronicle], report: TagReport) -> list[tuple[str, int]]:
    """(archetype, agent) pairs where pattern tagging and the oracle differ."""
    out = []
    for chron in chronicles:
        for name, tagged in report.tags.items():
            if name in ORACLES and (chron.agent_id in tagged) != ORACLES[name](chron):
                out.append((name, chron.agent_id))
    return out
