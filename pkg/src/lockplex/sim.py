"""Closed-loop simulation (controller + plant), scenarios and random drivers.

A scenario is a seed plus a scripted event list ``(tick, event)`` where an
event is an operator command or a fault toggle.  Replaying a scenario with
the same seed reproduces a byte-identical trace: all randomness (plant fault
profile draws, pre-generated random commands) derives from the seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .controller import Mutation, initial_state, run_burst
from .domain import (
    Action, Alphabet, COMMAND_KINDS, DomainError, PlantConfig, parse_action,
)
from .engine import Engine, TAG_AWAITING, TAG_EMITTING, TAG_STABLE
from .plant import PlantState, parse_fault, plant_init
from .traces import TraceRecord

_KIND_BY_TAG = {TAG_STABLE: "input", TAG_AWAITING: "read", TAG_EMITTING: "output"}


def record_walk(engine: Engine, steps: int, seed: int) -> list[TraceRecord]:
    """Seeded uniform random walk over the packed LTS as a classified trace.

    The walk runs on past ``steps`` until the pending burst (if any)
    completes, so the trace always ends in a stable state.
    """
    rng = random.Random(seed)
    p = engine.initial_packed
    records = []
    n = 0
    while n < steps or engine.tag_of(p) != TAG_STABLE:
        tag = engine.tag_of(p)
        ids = engine.enabled_ids(p)
        aid = ids[rng.randrange(len(ids))]
        records.append(TraceRecord(n, _KIND_BY_TAG[tag], engine.alphabet.decode(aid)))
        p = engine.step_packed(p, aid)
        n += 1
    return records


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioEvent:
    tick: int
    kind: str          # command | fault_on | fault_off
    payload: str       # action text or fault text

    def line(self) -> str:
        return "%d %s %s" % (self.tick, self.kind, self.payload)


@dataclass
class Scenario:
    seed: int = 0
    events: tuple[ScenarioEvent, ...] = ()

    def lines(self) -> list[str]:
        out = ["0 seed %d" % self.seed]
        out.extend(e.line() for e in self.events)
        return out

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        seed = 0
        events = []
        for raw in text.splitlines():
            raw = raw.strip()
            if not raw or raw.startswith("#"):
                continue
            parts = raw.split(" ", 2)
            if len(parts) != 3:
                raise DomainError("malformed scenario line: %r" % raw)
            tick_text, kind, payload = parts
            try:
                tick = int(tick_text)
            except ValueError:
                raise DomainError("bad tick in scenario line: %r" % raw)
            if kind == "seed":
                seed = int(payload)
            elif kind in ("command", "fault_on", "fault_off"):
                # validate payload syntax eagerly
                if kind == "command":
                    parse_action(payload)
                else:
                    parse_fault(payload)
                events.append(ScenarioEvent(tick, kind, payload))
            else:
                raise DomainError("unknown scenario event kind %r" % kind)
        events.sort(key=lambda e: e.tick)
        return cls(seed, tuple(events))

    @classmethod
    def load(cls, path) -> "Scenario":
        with open(path, "r", encoding="utf-8") as fp:
            return cls.parse(fp.read())

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fp:
            fp.write("\n".join(self.lines()) + "\n")


def random_commands(config: PlantConfig, ticks: int, rate: float,
                    seed: int) -> list[ScenarioEvent]:
    """Pre-generated operator commands, ``rate`` expected commands per tick."""
    rng = random.Random(seed ^ 0x5CE0A7)
    alphabet = Alphabet(config)
    commands = [a for a in alphabet.actions if a.kind in COMMAND_KINDS]
    events = []
    for t in range(1, ticks + 1):
        while rng.random() < rate:
            events.append(ScenarioEvent(t, "command",
                                        commands[rng.randrange(len(commands))].text()))
    return events


# ---------------------------------------------------------------------------
# Closed loop
# ---------------------------------------------------------------------------

class ClosedLoop:
    """One controller driving one plant; every action becomes a trace record."""

    def __init__(self, config: PlantConfig, seed: int = 0,
                 mutation: Mutation | None = None, profile: dict | None = None,
                 sink=None, keep_records: bool = True):
        self.config = config
        self.mutation = mutation
        self.controller = initial_state(config)
        self.plant: PlantState = plant_init(config, profile, seed)
        self.seq = 0
        self.tick_count = 0
        self.sink = sink
        self.records: list[TraceRecord] | None = [] if keep_records else None

    def _emit(self, kind: str, action: Action) -> TraceRecord:
        rec = TraceRecord(self.seq, kind, action)
        self.seq += 1
        if self.records is not None:
            self.records.append(rec)
        if self.sink is not None:
            self.sink(rec)
        return rec

    def submit(self, action: Action) -> list[TraceRecord]:
        """Feed one input through the controller; outputs drive the plant."""
        before = self.seq
        new_state, outputs, reads = run_burst(
            self.controller, action, self.plant.respond, self.config, self.mutation)
        self._emit("input", action)
        for read_action, _ in reads:
            self._emit("read", read_action)
        for out in outputs:
            self._emit("output", out)
            self.plant.apply(out)
        self.controller = new_state
        return self.records[before:] if self.records is not None else []

    def do_tick(self) -> list[TraceRecord]:
        self.tick_count += 1
        out = []
        for event in self.plant.tick():
            out.extend(self.submit(event))
        return out

    def apply_event(self, event: ScenarioEvent) -> None:
        if event.kind == "command":
            self.submit(parse_action(event.payload))
        elif event.kind == "fault_on":
            self.plant.inject_fault(parse_fault(event.payload), True)
        else:
            self.plant.inject_fault(parse_fault(event.payload), False)

    def run(self, scenario: Scenario, ticks: int) -> None:
        pending = sorted(scenario.events, key=lambda e: (e.tick,))
        i = 0
        while i < len(pending) and pending[i].tick <= 0:
            self.apply_event(pending[i])
            i += 1
        for t in range(1, ticks + 1):
            while i < len(pending) and pending[i].tick == t:
                self.apply_event(pending[i])
                i += 1
            self.do_tick()


def simulate(config: PlantConfig, scenario: Scenario, ticks: int,
             mutation: Mutation | None = None, profile: dict | None = None,
             sink=None, keep_records: bool = True) -> ClosedLoop:
    loop = ClosedLoop(config, scenario.seed, mutation, profile,
                      sink=sink, keep_records=keep_records)
    loop.run(scenario, ticks)
    return loop
