"""Plant configuration, communication data types and the action alphabet.

Everything downstream (controller, monitors, checker, simulator, service)
speaks in terms of the values defined here.  Action instances have a
canonical textual form, e.g. ``GateActuator(north,upstream,east,do_open)``,
used bit-exact in trace files and on the wire.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence


class DomainError(ValueError):
    """Raised for ill-formed configurations, actions or action text."""


# ---------------------------------------------------------------------------
# Identifiers and communication sorts
# ---------------------------------------------------------------------------

class LockId(Enum):
    NORTH = "north"
    SOUTH = "south"


class StreamSide(Enum):
    UPSTREAM = "upstream"
    DOWNSTREAM = "downstream"


class Orientation(Enum):
    EAST = "east"
    WEST = "west"


def opposite(side: StreamSide) -> StreamSide:
    return StreamSide.DOWNSTREAM if side is StreamSide.UPSTREAM else StreamSide.UPSTREAM


class ConsoleCommand(Enum):
    OPEN = "command_open"
    CLOSE = "command_close"
    STOP = "command_stop"


class EmergencyCommand(Enum):
    ACTIVATE = "activate"
    DEACTIVATE = "deactivate"


class ActuatorCommand(Enum):
    DO_OPEN = "do_open"
    DO_CLOSE = "do_close"
    DO_EMERGENCY_STOP = "do_emergencyStop"
    DO_END_STOP_CLOSING = "do_endStopClosing"
    DO_END_STOP_OPENING = "do_endStopOpening"


class SensorPosition(Enum):
    OPEN = "sense_open"
    CLOSED = "sense_closed"
    INTERMEDIATE = "sense_intermediate"
    FAIL = "fail_position"


class SingleLight(Enum):
    RED = "red"
    GREEN = "green"


class DoubleLight(Enum):
    SINGLE_RED = "single_red"
    SINGLE_GREEN = "single_green"
    REDRED = "redred"
    REDGREEN = "redgreen"


class SingleLightStatus(Enum):
    SHOW_RED = "show(red)"
    SHOW_GREEN = "show(green)"
    FAIL = "fail_single"

    @property
    def aspect(self) -> SingleLight | None:
        if self is SingleLightStatus.SHOW_RED:
            return SingleLight.RED
        if self is SingleLightStatus.SHOW_GREEN:
            return SingleLight.GREEN
        return None


class DoubleLightStatus(Enum):
    SHOW_SINGLE_RED = "show(single_red)"
    SHOW_SINGLE_GREEN = "show(single_green)"
    SHOW_REDRED = "show(redred)"
    SHOW_REDGREEN = "show(redgreen)"
    FAIL = "fail_double"

    @property
    def aspect(self) -> DoubleLight | None:
        if self is DoubleLightStatus.FAIL:
            return None
        return DoubleLight(self.value[5:-1])


class WaterLevel(Enum):
    EQUAL = "equal"
    UNEQUAL = "unequal"
    FAIL = "fail_water_sensor"


def show(aspect: SingleLight | DoubleLight) -> SingleLightStatus | DoubleLightStatus:
    """Injective embedding of a light aspect into the matching sensor status."""
    if isinstance(aspect, SingleLight):
        return SingleLightStatus("show(%s)" % aspect.value)
    if isinstance(aspect, DoubleLight):
        return DoubleLightStatus("show(%s)" % aspect.value)
    raise DomainError("not a light aspect: %r" % (aspect,))


BOTH_SIDES = (StreamSide.UPSTREAM, StreamSide.DOWNSTREAM)


# ---------------------------------------------------------------------------
# Plant configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlantConfig:
    """Which locks, orientations and whether the flood barrier exist.

    The full installation has two locks, both orientations and the barrier.
    Smaller configurations are first class so that the checker can enumerate
    state spaces exhaustively at desk scale.
    """

    locks: tuple[LockId, ...] = (LockId.NORTH, LockId.SOUTH)
    stream_sides: tuple[StreamSide, ...] = BOTH_SIDES
    orientations: tuple[Orientation, ...] = (Orientation.EAST, Orientation.WEST)
    include_barrier: bool = True

    def __post_init__(self) -> None:
        if tuple(self.stream_sides) != BOTH_SIDES:
            raise DomainError("a lock complex has exactly the upstream and downstream sides")
        if not self.locks or len(set(self.locks)) != len(self.locks):
            raise DomainError("locks must be a nonempty list of distinct identifiers")
        if not self.orientations or len(set(self.orientations)) != len(self.orientations):
            raise DomainError("orientations must be a nonempty list of distinct identifiers")

    @classmethod
    def full(cls) -> "PlantConfig":
        return cls()

    @classmethod
    def reduced1(cls) -> "PlantConfig":
        """One lock, both sides, one orientation, barrier included."""
        return cls(locks=(LockId.NORTH,), orientations=(Orientation.EAST,))

    @classmethod
    def mini(cls) -> "PlantConfig":
        """One lock, one orientation, no barrier: smallest meaningful plant."""
        return cls(locks=(LockId.NORTH,), orientations=(Orientation.EAST,),
                   include_barrier=False)

    @property
    def sides(self) -> tuple[StreamSide, ...]:
        return self.stream_sides

    def devices(self) -> list[tuple[LockId, StreamSide, Orientation]]:
        """Canonical (lock, side, orientation) order used everywhere."""
        return [(l, s, o) for l in self.locks for s in self.sides
                for o in self.orientations]

    def pairs(self) -> list[tuple[LockId, StreamSide]]:
        return [(l, s) for l in self.locks for s in self.sides]


BUILTIN_CONFIGS = {
    "full": PlantConfig.full,
    "reduced1": PlantConfig.reduced1,
    "mini": PlantConfig.mini,
}


# ---------------------------------------------------------------------------
# Actions
# ---------------------------------------------------------------------------

class ActionKind(Enum):
    # external inputs
    GATE_COMMAND = "GateCommand"
    PADDLE_COMMAND = "PaddleCommand"
    EMERGENCY_LOCK_COMMAND = "EmergencyLockCommand"
    BARRIER_COMMAND = "BarrierCommand"
    EMERGENCY_BARRIER_COMMAND = "EmergencyBarrierCommand"
    ENTERING_LIGHT_COMMAND = "EnteringTrafficLightCommand"
    LEAVING_LIGHT_COMMAND = "LeavingTrafficLightCommand"
    BARRIER_LIGHT_COMMAND = "BarrierTrafficLightCommand"
    # actuator outputs
    GATE_ACTUATOR = "GateActuator"
    PADDLE_ACTUATOR = "PaddleActuator"
    BARRIER_ACTUATOR = "BarrierActuator"
    ENTERING_LIGHT_ACTUATOR = "EnteringTrafficLightActuator"
    LEAVING_LIGHT_ACTUATOR = "LeavingTrafficLightActuator"
    BARRIER_LIGHT_ACTUATOR = "BarrierTrafficLightActuator"
    # sensor inputs
    GATE_SENSOR = "GateSensor"
    PADDLE_SENSOR = "PaddleSensor"
    BARRIER_SENSOR = "BarrierSensor"
    WATER_SENSOR = "WaterSensor"
    ENTERING_LIGHT_SENSOR = "EnteringTrafficLightSensor"
    LEAVING_LIGHT_SENSOR = "LeavingTrafficLightSensor"
    BARRIER_LIGHT_SENSOR = "BarrierTrafficLightSensor"
    # the technical no-op
    SKIP = "skip"


COMMAND_KINDS = frozenset({
    ActionKind.GATE_COMMAND, ActionKind.PADDLE_COMMAND,
    ActionKind.EMERGENCY_LOCK_COMMAND, ActionKind.BARRIER_COMMAND,
    ActionKind.EMERGENCY_BARRIER_COMMAND, ActionKind.ENTERING_LIGHT_COMMAND,
    ActionKind.LEAVING_LIGHT_COMMAND, ActionKind.BARRIER_LIGHT_COMMAND,
})

ACTUATOR_KINDS = frozenset({
    ActionKind.GATE_ACTUATOR, ActionKind.PADDLE_ACTUATOR,
    ActionKind.BARRIER_ACTUATOR, ActionKind.ENTERING_LIGHT_ACTUATOR,
    ActionKind.LEAVING_LIGHT_ACTUATOR, ActionKind.BARRIER_LIGHT_ACTUATOR,
})

# sensors the environment may report spontaneously in any stable state
SPONTANEOUS_SENSOR_KINDS = (
    ActionKind.GATE_SENSOR, ActionKind.PADDLE_SENSOR,
    ActionKind.BARRIER_SENSOR, ActionKind.WATER_SENSOR,
)

# light sensors are only ever read inline while a handler awaits them
READ_SENSOR_KINDS = frozenset({
    ActionKind.ENTERING_LIGHT_SENSOR, ActionKind.LEAVING_LIGHT_SENSOR,
    ActionKind.BARRIER_LIGHT_SENSOR,
})

INPUT_KINDS = COMMAND_KINDS | set(SPONTANEOUS_SENSOR_KINDS) | READ_SENSOR_KINDS | {ActionKind.SKIP}


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    args: tuple = ()

    def is_output(self) -> bool:
        return self.kind in ACTUATOR_KINDS

    def is_input(self) -> bool:
        return not self.is_output()

    def text(self) -> str:
        if self.kind is ActionKind.SKIP:
            return "skip"
        return "%s(%s)" % (self.kind.value, ",".join(a.value for a in self.args))

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.text()


SKIP = Action(ActionKind.SKIP)

# argument sorts per action kind; entries are either a fixed enum type or one
# of the config-dependent markers "lock" / "side" / "orientation"
_ARG_SORTS: dict[ActionKind, tuple] = {
    ActionKind.GATE_COMMAND: ("lock", "side", ConsoleCommand),
    ActionKind.PADDLE_COMMAND: ("lock", "side", ConsoleCommand),
    ActionKind.EMERGENCY_LOCK_COMMAND: ("lock", EmergencyCommand),
    ActionKind.BARRIER_COMMAND: (ConsoleCommand,),
    ActionKind.EMERGENCY_BARRIER_COMMAND: (EmergencyCommand,),
    ActionKind.ENTERING_LIGHT_COMMAND: ("lock", "side", DoubleLight),
    ActionKind.LEAVING_LIGHT_COMMAND: ("lock", "side", SingleLight),
    ActionKind.BARRIER_LIGHT_COMMAND: ("side", SingleLight),
    ActionKind.GATE_ACTUATOR: ("lock", "side", "orientation", ActuatorCommand),
    ActionKind.PADDLE_ACTUATOR: ("lock", "side", "orientation", ActuatorCommand),
    ActionKind.BARRIER_ACTUATOR: (ActuatorCommand,),
    ActionKind.ENTERING_LIGHT_ACTUATOR: ("lock", "side", "orientation", DoubleLight),
    ActionKind.LEAVING_LIGHT_ACTUATOR: ("lock", "side", "orientation", SingleLight),
    ActionKind.BARRIER_LIGHT_ACTUATOR: ("side", "orientation", SingleLight),
    ActionKind.GATE_SENSOR: ("lock", "side", "orientation", SensorPosition),
    ActionKind.PADDLE_SENSOR: ("lock", "side", "orientation", SensorPosition),
    ActionKind.BARRIER_SENSOR: (SensorPosition,),
    ActionKind.WATER_SENSOR: ("lock", "side", WaterLevel),
    ActionKind.ENTERING_LIGHT_SENSOR: ("lock", "side", "orientation", DoubleLightStatus),
    ActionKind.LEAVING_LIGHT_SENSOR: ("lock", "side", "orientation", SingleLightStatus),
    ActionKind.BARRIER_LIGHT_SENSOR: ("side", "orientation", SingleLightStatus),
    ActionKind.SKIP: (),
}

_BARRIER_KINDS = frozenset({
    ActionKind.BARRIER_COMMAND, ActionKind.EMERGENCY_BARRIER_COMMAND,
    ActionKind.BARRIER_LIGHT_COMMAND, ActionKind.BARRIER_ACTUATOR,
    ActionKind.BARRIER_LIGHT_ACTUATOR, ActionKind.BARRIER_SENSOR,
    ActionKind.BARRIER_LIGHT_SENSOR,
})


def _arg_domain(sort, config: PlantConfig) -> Sequence:
    if sort == "lock":
        return config.locks
    if sort == "side":
        return config.sides
    if sort == "orientation":
        return config.orientations
    return list(sort)


def iter_instances(config: PlantConfig, kind: ActionKind) -> Iterator[Action]:
    """All well-typed instances of one action kind under a configuration."""
    if kind not in _ARG_SORTS:
        raise DomainError("unknown action kind: %r" % (kind,))
    if kind in _BARRIER_KINDS and not config.include_barrier:
        return
    domains = [_arg_domain(s, config) for s in _ARG_SORTS[kind]]
    for args in itertools.product(*domains):
        yield Action(kind, tuple(args))


def instances(config: PlantConfig, kind: ActionKind) -> int:
    """Number of distinct argument tuples for a kind under this config."""
    return sum(1 for _ in iter_instances(config, kind))


# kind enumeration order fixed so the dense encoding is canonical;
# skip first so it has the reserved index 0
_KIND_ORDER = (
    ActionKind.SKIP,
    ActionKind.GATE_COMMAND, ActionKind.PADDLE_COMMAND,
    ActionKind.EMERGENCY_LOCK_COMMAND, ActionKind.BARRIER_COMMAND,
    ActionKind.EMERGENCY_BARRIER_COMMAND, ActionKind.ENTERING_LIGHT_COMMAND,
    ActionKind.LEAVING_LIGHT_COMMAND, ActionKind.BARRIER_LIGHT_COMMAND,
    ActionKind.GATE_SENSOR, ActionKind.PADDLE_SENSOR,
    ActionKind.BARRIER_SENSOR, ActionKind.WATER_SENSOR,
    ActionKind.ENTERING_LIGHT_SENSOR, ActionKind.LEAVING_LIGHT_SENSOR,
    ActionKind.BARRIER_LIGHT_SENSOR,
    ActionKind.GATE_ACTUATOR, ActionKind.PADDLE_ACTUATOR,
    ActionKind.BARRIER_ACTUATOR, ActionKind.ENTERING_LIGHT_ACTUATOR,
    ActionKind.LEAVING_LIGHT_ACTUATOR, ActionKind.BARRIER_LIGHT_ACTUATOR,
)

SKIP_INDEX = 0


class Alphabet:
    """Dense, deterministic numbering of every action under one config."""

    def __init__(self, config: PlantConfig):
        self.config = config
        self.actions: list[Action] = []
        for kind in _KIND_ORDER:
            self.actions.extend(iter_instances(config, kind))
        self._index = {a: i for i, a in enumerate(self.actions)}
        assert self.actions[SKIP_INDEX] is not None and self.actions[0].kind is ActionKind.SKIP

    def __len__(self) -> int:
        return len(self.actions)

    def encode(self, action: Action) -> int:
        try:
            return self._index[action]
        except KeyError:
            raise DomainError("action not in alphabet for this config: %s" % action.text())

    def decode(self, index: int) -> Action:
        if not 0 <= index < len(self.actions):
            raise DomainError("action index out of range: %d" % index)
        return self.actions[index]

    def ids_of_kind(self, kind: ActionKind) -> list[int]:
        return [i for i, a in enumerate(self.actions) if a.kind is kind]

    def stable_input_ids(self) -> list[int]:
        """Everything enabled in a stable state: commands, spontaneous sensors, skip."""
        out = [SKIP_INDEX]
        for kind in _KIND_ORDER:
            if kind in COMMAND_KINDS or kind in SPONTANEOUS_SENSOR_KINDS:
                out.extend(self.ids_of_kind(kind))
        return out


def encode_action(action: Action, alphabet: Alphabet) -> int:
    return alphabet.encode(action)


def decode_action(index: int, alphabet: Alphabet) -> Action:
    return alphabet.decode(index)


# ---------------------------------------------------------------------------
# Textual action syntax
# ---------------------------------------------------------------------------

_KIND_BY_NAME = {k.value: k for k in ActionKind}


def parse_action(text: str) -> Action:
    """Parse the canonical action syntax, `skip` included.

    Light statuses contain nested parentheses (`show(red)`), so arguments are
    split at top-level commas only.
    """
    text = text.strip()
    if text == "skip":
        return SKIP
    lpar = text.find("(")
    if lpar < 0 or not text.endswith(")"):
        raise DomainError("malformed action text: %r" % text)
    name, body = text[:lpar], text[lpar + 1:-1]
    kind = _KIND_BY_NAME.get(name)
    if kind is None or kind is ActionKind.SKIP:
        raise DomainError("unknown action name: %r" % name)
    parts: list[str] = []
    depth = 0
    cur = ""
    for ch in body:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        cur += ch
    if cur or parts:
        parts.append(cur)
    sorts = _ARG_SORTS[kind]
    if len(parts) != len(sorts):
        raise DomainError("wrong arity for %s: %r" % (name, text))
    args = []
    for raw, sort in zip(parts, sorts):
        raw = raw.strip()
        enum_type = {"lock": LockId, "side": StreamSide, "orientation": Orientation}.get(sort, sort)
        try:
            args.append(enum_type(raw))
        except ValueError:
            raise DomainError("bad argument %r in %r" % (raw, text))
    return Action(kind, tuple(args))
