"""Physical model of the lock complex with fault injection.

Devices travel 0..P position units (0 closed, P open); water differentials
relax toward zero while a gate or paddle on that boundary is open and slowly
rebuild once everything is shut.  Sensors report position threshold
crossings edge-triggered plus a periodic heartbeat; light reads answer with
the physical aspect.  Faults: a failing sensor, a light stuck on an aspect,
or a stalled motor.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .domain import (
    Action, ActionKind, ActuatorCommand, DomainError, DoubleLight,
    DoubleLightStatus, LockId, Orientation, PlantConfig, SensorPosition,
    SingleLight, SingleLightStatus, StreamSide, WaterLevel, show,
)

TRAVEL = 10            # ticks for a full open/close traversal
HEARTBEAT = 25         # periodic re-report of every sensor
WATER_MAX = 5          # differential across a freshly closed boundary
WATER_REFILL = 40      # ticks per unit of differential rebuild


class Motion(Enum):
    STILL = "still"
    OPENING = "opening"
    CLOSING = "closing"


class FaultKind(Enum):
    SENSOR_FAIL = "sensor_fail"
    STUCK_ASPECT = "stuck_aspect"
    MOTOR_STALL = "motor_stall"


@dataclass(frozen=True)
class Fault:
    target: tuple            # ("gate", l, s, o) | ("barrier",) | ("water", l, s)
    kind: FaultKind          # | ("entering_light"/"leaving_light", l, s, o)
    aspect: object = None    # | ("barrier_light", s, o)

    def text(self) -> str:
        kind = self.kind.value
        if self.kind is FaultKind.STUCK_ASPECT:
            kind = "stuck_aspect(%s)" % self.aspect.value
        name, args = self.target[0], self.target[1:]
        tgt = name if not args else "%s(%s)" % (name, ",".join(a.value for a in args))
        return "%s %s" % (kind, tgt)


_TARGET_ARGS = {
    "gate": ("lock", "side", "orientation"),
    "paddle": ("lock", "side", "orientation"),
    "barrier": (),
    "water": ("lock", "side"),
    "entering_light": ("lock", "side", "orientation"),
    "leaving_light": ("lock", "side", "orientation"),
    "barrier_light": ("side", "orientation"),
}

_ENUM_OF = {"lock": LockId, "side": StreamSide, "orientation": Orientation}


def parse_fault(text: str) -> Fault:
    """Parse ``<kind> <target>``, e.g. ``stuck_aspect(green) leaving_light(north,upstream,east)``."""
    try:
        kind_text, target_text = text.strip().split(" ", 1)
    except ValueError:
        raise DomainError("malformed fault: %r" % text)
    aspect = None
    if kind_text.startswith("stuck_aspect(") and kind_text.endswith(")"):
        raw = kind_text[len("stuck_aspect("):-1]
        kind = FaultKind.STUCK_ASPECT
        try:
            aspect = SingleLight(raw)
        except ValueError:
            try:
                aspect = DoubleLight(raw)
            except ValueError:
                raise DomainError("unknown aspect %r in fault" % raw)
    else:
        try:
            kind = FaultKind(kind_text)
        except ValueError:
            raise DomainError("unknown fault kind %r" % kind_text)
    target_text = target_text.strip()
    if "(" in target_text:
        name, body = target_text.split("(", 1)
        parts = body.rstrip(")").split(",")
    else:
        name, parts = target_text, []
    if name not in _TARGET_ARGS:
        raise DomainError("unknown fault target %r" % name)
    sorts = _TARGET_ARGS[name]
    if len(parts) != len(sorts):
        raise DomainError("wrong arity for fault target %r" % target_text)
    args = tuple(_ENUM_OF[s](p.strip()) for s, p in zip(sorts, parts))
    return Fault((name,) + args, kind, aspect)


class PlantState:
    """Mutable physical truth for one simulation session."""

    def __init__(self, config: PlantConfig, profile: dict | None = None, seed: int = 0):
        self.config = config
        profile = profile or {}
        for kind, prob in profile.items():
            if not (isinstance(prob, (int, float)) and 0 <= prob <= 1):
                raise DomainError("fault probability for %r must be in [0,1]" % kind)
        self.profile = {FaultKind(k) if not isinstance(k, FaultKind) else k: float(v)
                        for k, v in profile.items()}
        self.rng = random.Random(seed)
        self.tick_count = 0
        self.position: dict[tuple, int] = {}
        self.motion: dict[tuple, Motion] = {}
        self._movables: list[tuple] = []
        for d in config.devices():
            self.position[("gate",) + d] = 0
            self.position[("paddle",) + d] = 0
        if config.include_barrier:
            self.position[("barrier",)] = TRAVEL     # normal operation: open
        for key in self.position:
            self.motion[key] = Motion.STILL
            self._movables.append(key)
        self.aspect: dict[tuple, object] = {}
        for l, s in config.pairs():
            for o in config.orientations:
                self.aspect[("entering_light", l, s, o)] = DoubleLight.SINGLE_RED
                self.aspect[("leaving_light", l, s, o)] = SingleLight.RED
        if config.include_barrier:
            for s in config.sides:
                for o in config.orientations:
                    self.aspect[("barrier_light", s, o)] = SingleLight.RED
        self.water: dict[tuple, int] = {p: WATER_MAX for p in config.pairs()}
        self.faults: dict[tuple, Fault] = {}

    # ------------------------------------------------------------------
    # faults
    # ------------------------------------------------------------------

    def _validate_target(self, target: tuple) -> None:
        name = target[0]
        if name in ("gate", "paddle", "barrier"):
            if target[1:] and ("gate",) + target[1:] not in self.position \
                    and ("paddle",) + target[1:] not in self.position:
                raise DomainError("fault target outside config: %r" % (target,))
            if name == "barrier" and not self.config.include_barrier:
                raise DomainError("no barrier in this configuration")
        elif name == "water":
            if target[1:] not in self.water:
                raise DomainError("fault target outside config: %r" % (target,))
        elif name in ("entering_light", "leaving_light", "barrier_light"):
            if target not in self.aspect:
                raise DomainError("fault target outside config: %r" % (target,))
        else:
            raise DomainError("unknown fault target %r" % (target,))

    def inject_fault(self, fault: Fault, on: bool = True) -> None:
        self._validate_target(fault.target)
        if fault.kind is FaultKind.STUCK_ASPECT:
            wants_double = fault.target[0] == "entering_light"
            if wants_double != isinstance(fault.aspect, DoubleLight):
                raise DomainError("aspect %r does not fit light %r"
                                  % (fault.aspect, fault.target))
        if on:
            existing = self.faults.get(fault.target)
            if existing is not None and existing != fault:
                raise DomainError("conflicting fault already present on %r"
                                  % (fault.target,))
            self.faults[fault.target] = fault
            if fault.kind is FaultKind.STUCK_ASPECT:
                # the light is stuck showing this aspect from now on
                self.aspect[fault.target] = fault.aspect
        else:
            existing = self.faults.get(fault.target)
            if existing == fault:
                del self.faults[fault.target]

    def _fault(self, target: tuple) -> Fault | None:
        return self.faults.get(target)

    # ------------------------------------------------------------------
    # actuator commands
    # ------------------------------------------------------------------

    def apply(self, action: Action) -> None:
        k, args = action.kind, action.args
        if k is ActionKind.GATE_ACTUATOR or k is ActionKind.PADDLE_ACTUATOR:
            name = "gate" if k is ActionKind.GATE_ACTUATOR else "paddle"
            key = (name,) + args[:3]
            cmd = args[3]
        elif k is ActionKind.BARRIER_ACTUATOR:
            key = ("barrier",)
            cmd = args[0]
        elif k is ActionKind.ENTERING_LIGHT_ACTUATOR:
            return self._set_aspect(("entering_light",) + args[:3], args[3])
        elif k is ActionKind.LEAVING_LIGHT_ACTUATOR:
            return self._set_aspect(("leaving_light",) + args[:3], args[3])
        elif k is ActionKind.BARRIER_LIGHT_ACTUATOR:
            return self._set_aspect(("barrier_light",) + args[:2], args[2])
        else:
            raise DomainError("not an actuator action: %s" % action.text())
        if key not in self.position:
            raise DomainError("actuator targets a device outside config: %s"
                              % action.text())
        fault = self._fault(key)
        if cmd is ActuatorCommand.DO_OPEN:
            if not (fault and fault.kind is FaultKind.MOTOR_STALL):
                self.motion[key] = Motion.OPENING
        elif cmd is ActuatorCommand.DO_CLOSE:
            if not (fault and fault.kind is FaultKind.MOTOR_STALL):
                self.motion[key] = Motion.CLOSING
        else:
            # emergency stop and both end stops cut the motor
            self.motion[key] = Motion.STILL

    def _set_aspect(self, key: tuple, aspect) -> None:
        if key not in self.aspect:
            raise DomainError("light outside config: %r" % (key,))
        fault = self._fault(key)
        if fault and fault.kind is FaultKind.STUCK_ASPECT:
            return
        self.aspect[key] = aspect

    # ------------------------------------------------------------------
    # inline sensor reads
    # ------------------------------------------------------------------

    def respond(self, slot) -> object:
        """Answer an inline light read with the physical aspect or a failure."""
        if slot.kind is ActionKind.ENTERING_LIGHT_SENSOR:
            key = ("entering_light",) + slot.args
            fail = DoubleLightStatus.FAIL
        elif slot.kind is ActionKind.LEAVING_LIGHT_SENSOR:
            key = ("leaving_light",) + slot.args
            fail = SingleLightStatus.FAIL
        elif slot.kind is ActionKind.BARRIER_LIGHT_SENSOR:
            key = ("barrier_light",) + slot.args
            fail = SingleLightStatus.FAIL
        else:
            raise DomainError("only light sensors are read inline: %r" % (slot,))
        if key not in self.aspect:
            raise DomainError("read targets a light outside config: %r" % (key,))
        fault = self._fault(key)
        if fault and fault.kind is FaultKind.SENSOR_FAIL:
            return fail
        return show(self.aspect[key])

    # ------------------------------------------------------------------
    # time
    # ------------------------------------------------------------------

    def _position_event(self, key: tuple, classification: SensorPosition) -> Action:
        fault = self._fault(key)
        value = SensorPosition.FAIL if fault and fault.kind is FaultKind.SENSOR_FAIL \
            else classification
        name, args = key[0], key[1:]
        if name == "gate":
            return Action(ActionKind.GATE_SENSOR, args + (value,))
        if name == "paddle":
            return Action(ActionKind.PADDLE_SENSOR, args + (value,))
        return Action(ActionKind.BARRIER_SENSOR, (value,))

    def _water_event(self, pair: tuple, level: WaterLevel) -> Action:
        fault = self._fault(("water",) + pair)
        value = WaterLevel.FAIL if fault and fault.kind is FaultKind.SENSOR_FAIL else level
        return Action(ActionKind.WATER_SENSOR, pair + (value,))

    def _classify(self, key: tuple) -> SensorPosition:
        pos = self.position[key]
        if pos <= 0:
            return SensorPosition.CLOSED
        if pos >= TRAVEL:
            return SensorPosition.OPEN
        return SensorPosition.INTERMEDIATE

    def tick(self) -> list[Action]:
        """Advance one time unit; returns spontaneous sensor events in order."""
        self.tick_count += 1
        events: list[Action] = []
        for key in self._movables:
            motion = self.motion[key]
            if motion is Motion.STILL:
                continue
            old = self.position[key]
            new = min(TRAVEL, old + 1) if motion is Motion.OPENING else max(0, old - 1)
            self.position[key] = new
            if new != old:
                if new == TRAVEL:
                    events.append(self._position_event(key, SensorPosition.OPEN))
                elif new == 0:
                    events.append(self._position_event(key, SensorPosition.CLOSED))
        for pair in self.config.pairs():
            l, s = pair
            open_count = sum(
                1 for o in self.config.orientations
                for name in ("gate", "paddle")
                if self.position[(name, l, s, o)] > 0)
            old = self.water[pair]
            if open_count:
                new = max(0, old - open_count)
            elif old < WATER_MAX and self.tick_count % WATER_REFILL == 0:
                new = old + 1
            else:
                new = old
            self.water[pair] = new
            if old > 0 and new == 0:
                events.append(self._water_event(pair, WaterLevel.EQUAL))
            elif old == 0 and new > 0:
                events.append(self._water_event(pair, WaterLevel.UNEQUAL))
        if self.tick_count % HEARTBEAT == 0:
            for key in self._movables:
                events.append(self._position_event(key, self._classify(key)))
            for pair in self.config.pairs():
                level = WaterLevel.EQUAL if self.water[pair] == 0 else WaterLevel.UNEQUAL
                events.append(self._water_event(pair, level))
        for kind, prob in self.profile.items():
            if prob and self.rng.random() < prob:
                self._random_fault(kind)
        return events

    def _random_fault(self, kind: FaultKind) -> None:
        candidates = [t for t in self._fault_targets(kind) if t not in self.faults]
        if not candidates:
            return
        target = candidates[self.rng.randrange(len(candidates))]
        aspect = None
        if kind is FaultKind.STUCK_ASPECT:
            aspect = (self.rng.choice(list(DoubleLight))
                      if target[0] == "entering_light"
                      else self.rng.choice(list(SingleLight)))
        self.faults[target] = Fault(target, kind, aspect)

    def _fault_targets(self, kind: FaultKind) -> list[tuple]:
        if kind is FaultKind.MOTOR_STALL:
            return list(self._movables)
        if kind is FaultKind.STUCK_ASPECT:
            return list(self.aspect)
        return list(self._movables) + [("water",) + p for p in self.config.pairs()] \
            + list(self.aspect)

    # ------------------------------------------------------------------
    # snapshots
    # ------------------------------------------------------------------

    def snapshot(self) -> dict:
        def key_text(key):
            return "/".join(x.value if hasattr(x, "value") else str(x) for x in key[1:]) \
                or "-"
        return {
            "tick": self.tick_count,
            "positions": {key[0] + ":" + key_text(key): self.position[key]
                          for key in self._movables},
            "motions": {key[0] + ":" + key_text(key): self.motion[key].value
                        for key in self._movables},
            "aspects": {key[0] + ":" + key_text(key): v.value
                        for key, v in self.aspect.items()},
            "water": {"%s/%s" % (l.value, s.value): v
                      for (l, s), v in self.water.items()},
            "faults": [f.text() for f in self.faults.values()],
            "travel": TRAVEL,
        }


def plant_init(config: PlantConfig, profile: dict | None = None,
               seed: int = 0) -> PlantState:
    return PlantState(config, profile, seed)
