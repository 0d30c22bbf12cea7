"""Per-agent event logs.

A log line is ``<day>|<KIND>|<arg>,<arg>,...`` followed by a newline. Agent
references are written ``A<id>`` so that a pattern bound to ``A7`` can never
match inside ``A71``. The rendered text is what archetype patterns run on.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, NamedTuple

LOG_FORMAT_VERSION = 1
LINE_RE = re.compile(r"^\d+\|[A-Z_]+\|[^|\n]*$")


class Kind(str, Enum):
    BORN = "BORN"
    MOVE = "MOVE"
    EAT = "EAT"
    HUNGRY = "HUNGRY"
    SEEK_MATE = "SEEK_MATE"
    MATE = "MATE"
    PREGNANT = "PREGNANT"
    BIRTH = "BIRTH"
    ATTACK_OK = "ATTACK_OK"
    ATTACK_FAIL = "ATTACK_FAIL"
    ATTACKED = "ATTACKED"
    DEFENDED = "DEFENDED"
    ESCAPED = "ESCAPED"
    DIE = "DIE"


class Event(NamedTuple):
    day: int
    kind: Kind
    args: tuple[str, ...] = ()


def agent_ref(agent_id: int) -> str:
    return f"A{agent_id}"


def ref_id(ref: str) -> int:
    """Inverse of :func:`agent_ref`."""
    if not ref.startswith("A") or not ref[1:].isdigit():
        raise ValueError(f"not an agent reference: {ref!r}")
    return int(ref[1:])


@dataclass
class Chronicle:
    agent_id: int
    profile_index: int
    events: list[Event] = field(default_factory=list)

    @property
    def ref(self) -> str:
        return agent_ref(self.agent_id)

    def add(self, day: int, kind: Kind, *args: str) -> None:
        self.events.append(Event(day, kind, args))

    def count(self, kind: Kind) -> int:
        return sum(1 for e in self.events if e.kind is kind)

    @property
    def dead(self) -> bool:
        return bool(self.events) and self.events[-1].kind is Kind.DIE

    def validate(self) -> list[str]:
        """Ordering problems in this chronicle, empty when valid."""
        problems = []
        ev = self.events
        if not ev or ev[0].kind is not Kind.BORN:
            problems.append("first event is not BORN")
        for prev, cur in zip(ev, ev[1:]):
            if cur.day < prev.day:
                problems.append(f"day goes backwards at {cur.day}")
                break
        deaths = [i for i, e in enumerate(ev) if e.kind is Kind.DIE]
        if len(deaths) > 1 or (deaths and deaths[0] != len(ev) - 1):
            problems.append("DIE is not the single last event")
        return problems


_KIND_TEXT = {k: k.value for k in Kind}
_KIND_FIELD = {k: f"|{k.value}|" for k in Kind}


def render_line(event: Event) -> str:
    return f"{event.day}|{_KIND_TEXT[event.kind]}|{','.join(event.args)}\n"


def render_log(chronicle: Chronicle) -> str:
    text = _KIND_FIELD
    join = ",".join
    return "".join([f"{d}{text[k]}{join(a)}\n" for d, k, a in chronicle.events])


class LogParseError(ValueError):
    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno
        self.line = line


def parse_line(line: str, lineno: int = 1) -> Event:
    if not LINE_RE.match(line):
        raise LogParseError(lineno, line, "malformed record")
    day, kind, rest = line.split("|")
    try:
        k = Kind(kind)
    except ValueError:
        raise LogParseError(lineno, line, f"unknown event kind {kind}") from None
    return Event(int(day), k, tuple(rest.split(",")) if rest else ())


def parse_log(text: str, agent_id: int, profile_index: int = 0) -> Chronicle:
    if text and not text.endswith("\n"):
        raise LogParseError(text.count("\n") + 1, text.rsplit("\n", 1)[-1], "missing final newline")
    events = [parse_line(line, i) for i, line in enumerate(text.splitlines(), 1)]
    return Chronicle(agent_id, profile_index, events)


@dataclass(frozen=True)
class Violation:
    kind: str
    agents: tuple[int, ...]
    day: int | None
    detail: str


def check_coherence(chronicles: dict[int, Chronicle] | Iterable[Chronicle]) -> list[Violation]:
    """Cross-log consistency of interaction events.

    Attacks must appear as ATTACK_OK/ATTACK_FAIL on the attacker and ATTACKED
    on the target on the same day, matings on both partners, and every BIRTH
    must be matched by the child's BORN naming the parent.
    """
    if not isinstance(chronicles, dict):
        chronicles = {c.agent_id: c for c in chronicles}
    out: list[Violation] = []
    attacks: Counter = Counter()  # (day, attacker, target)
    attacked: Counter = Counter()
    mates: Counter = Counter()  # (day, a, b)
    births: Counter = Counter()  # (day, parent, child)
    borns: Counter = Counter()

    for aid, chron in chronicles.items():
        for problem in chron.validate():
            out.append(Violation("ordering", (aid,), None, problem))
        for e in chron.events:
            k = e.kind
            if k is Kind.BORN:
                if e.args:
                    borns[(e.day, ref_id(e.args[0]), aid)] += 1
                continue
            if k not in _INTERACTIONS:
                continue
            other = ref_id(e.args[0])
            if other not in chronicles:
                out.append(Violation("unknown-agent", (aid, other), e.day, f"{k.value} names missing agent"))
            if k is Kind.ATTACK_OK or k is Kind.ATTACK_FAIL:
                attacks[(e.day, aid, other)] += 1
            elif k is Kind.ATTACKED:
                attacked[(e.day, other, aid)] += 1
            elif k is Kind.MATE:
                mates[(e.day, aid, other)] += 1
            elif k is Kind.BIRTH:
                births[(e.day, aid, other)] += 1

    for key in sorted(set(attacks) | set(attacked)):
        if attacks[key] != attacked[key]:
            day, a, b = key
            out.append(Violation(
                "attack", (a, b), day,
                f"A{a} logs {attacks[key]} attack(s) on A{b}, A{b} logs {attacked[key]} ATTACKED",
            ))
    for key in sorted(mates):
        day, a, b = key
        if mates[key] != mates[(day, b, a)]:
            out.append(Violation("mate", (a, b), day, f"MATE by A{a} with A{b} is not mirrored"))
    for key in sorted(set(births) | set(borns)):
        if births[key] != borns[key]:
            day, p, c = key
            out.append(Violation("birth", (p, c), day, f"BIRTH of A{c} by A{p} not matched by BORN"))
    return out


_INTERACTIONS = frozenset({Kind.ATTACK_OK, Kind.ATTACK_FAIL, Kind.ATTACKED, Kind.MATE, Kind.BIRTH})


def write_log_dir(chronicles: Iterable[Chronicle], out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for chron in chronicles:
        (out_dir / f"{chron.ref}.log").write_text(render_log(chron), encoding="utf-8", newline="\n")


_LOG_NAME = re.compile(r"^A(\d+)\.log$")


def read_log_dir(log_dir: Path) -> tuple[dict[int, Chronicle], dict | None, list[str]]:
    """Load every ``A<id>.log`` below ``log_dir``.

    Returns (chronicles, run summary or None, errors). A malformed file is
    reported in ``errors`` with its file name and line number and skipped.
    """
    summary = None
    summary_path = log_dir / "run.json"
    if summary_path.exists():
        summary = json.loads(summary_path.read_text(encoding="utf-8"))
    profiles = {}
    if summary:
        profiles = {ref_id(k): v.get("profile", 0) for k, v in summary.get("agents", {}).items()}

    chronicles: dict[int, Chronicle] = {}
    errors = []
    for path in sorted(log_dir.iterdir()):
        m = _LOG_NAME.match(path.name)
        if not m:
            continue
        aid = int(m.group(1))
        try:
            chronicles[aid] = parse_log(path.read_text(encoding="utf-8"), aid, profiles.get(aid, 0))
        except LogParseError as exc:
            errors.append(f"{path.name}:{exc.lineno}: {exc}")
    return dict(sorted(chronicles.items())), summary, errors
