"""The lock controller as a deterministic labelled transition system.

A stable state accepts every console command, emergency command, spontaneous
position/water sensor report and skip.  Handlers either consume the input
silently (failed guard), answer it with a deterministic burst of actuator
outputs, or first read traffic-light sensors inline (Awaiting mode) and then
decide.  All administration updates take effect when the burst's outputs are
emitted; light set-points always cover both configured orientations.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

from .domain import (
    Action, ActionKind, ActuatorCommand, Alphabet, ConsoleCommand,
    DomainError, DoubleLight, DoubleLightStatus, EmergencyCommand, LockId,
    PlantConfig, SensorPosition, SingleLight, SingleLightStatus, StreamSide,
    WaterLevel, opposite,
)


class NotEnabledError(RuntimeError):
    """Stepping an action that is not enabled in the current state."""


class Position(Enum):
    OPENING = "opening"
    CLOSING = "closing"
    OPENED = "opened"
    CLOSED = "closed"


class FrozenMap(dict):
    """Hashable read-only mapping for controller parameters."""

    def __hash__(self):
        return hash(frozenset(self.items()))

    def _blocked(self, *a, **kw):
        raise TypeError("controller parameters are immutable")

    __setitem__ = __delitem__ = _blocked
    update = pop = popitem = clear = setdefault = _blocked

    def set(self, key, value) -> "FrozenMap":
        d = dict(self)
        d[key] = value
        return FrozenMap(d)

    def set_many(self, items) -> "FrozenMap":
        d = dict(self)
        d.update(items)
        return FrozenMap(d)


@dataclass(frozen=True)
class ControllerParams:
    """The nine administration parameters of the controller."""

    barrier_status: Position | None
    barrier_in_emergency: bool
    barrier_light_set: FrozenMap          # side -> SingleLight
    gate_status: FrozenMap                # (lock, side, orientation) -> Position
    paddle_status: FrozenMap              # (lock, side, orientation) -> Position
    entering_light_set: FrozenMap         # (lock, side) -> DoubleLight
    leaving_light_set: FrozenMap          # (lock, side) -> SingleLight
    water_equal: FrozenMap                # (lock, side) -> bool
    locks_in_emergency: frozenset


@dataclass(frozen=True)
class Stable:
    pass


class HandlerId(Enum):
    GATE_OPEN = "gate_open"
    ENTERING_GREEN = "entering_green"
    LEAVING_GREEN = "leaving_green"
    BARRIER_OPEN = "barrier_open"


@dataclass(frozen=True)
class ReadSlot:
    """A pending inline sensor read: kind plus all arguments but the status."""

    kind: ActionKind
    args: tuple

    @property
    def status_type(self):
        if self.kind is ActionKind.ENTERING_LIGHT_SENSOR:
            return DoubleLightStatus
        return SingleLightStatus

    def responses(self) -> tuple[Action, ...]:
        return tuple(Action(self.kind, self.args + (v,)) for v in self.status_type)

    def with_status(self, status) -> Action:
        return Action(self.kind, self.args + (status,))


@dataclass(frozen=True)
class Awaiting:
    handler: HandlerId
    handler_args: tuple
    reads_remaining: tuple[ReadSlot, ...]
    ok_so_far: bool = True

    def __post_init__(self):
        if not self.reads_remaining:
            raise DomainError("Awaiting mode requires at least one pending read")


@dataclass(frozen=True)
class Emitting:
    queue: tuple[Action, ...]
    continuation: ControllerParams

    def __post_init__(self):
        if not self.queue:
            raise DomainError("Emitting mode requires a nonempty queue")


Mode = Stable | Awaiting | Emitting


@dataclass(frozen=True)
class ControllerState:
    """Parameters plus handler phase.

    While emitting, ``params`` already carries the burst's administration
    updates and equals ``mode.continuation``; while awaiting reads, ``params``
    is still the pre-burst administration.
    """

    params: ControllerParams
    mode: Mode = Stable()

    @property
    def stable(self) -> bool:
        return isinstance(self.mode, Stable)


# ---------------------------------------------------------------------------
# Mutations (used by the fault-detection suite; None means the real controller)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mutation:
    """A named, deliberate defect injected into the controller."""

    name: str
    description: str
    drop_water_guard: bool = False
    drop_emergency_check_gate_close: bool = False
    barrier_open_unconditional: bool = False
    skip_light_red_on_gate_stop: bool = False
    treat_fail_single_as_red: bool = False
    drop_opposite_paddle_check: bool = False
    drop_redgreen_guard: bool = False
    drop_endstop_condition: bool = False


# ---------------------------------------------------------------------------
# Initial state
# ---------------------------------------------------------------------------

def initial_state(config: PlantConfig) -> ControllerState:
    """Stable start: barrier open, everything else closed / red / no emergency."""
    params = ControllerParams(
        barrier_status=Position.OPENED if config.include_barrier else None,
        barrier_in_emergency=False,
        barrier_light_set=FrozenMap(
            {s: SingleLight.RED for s in config.sides} if config.include_barrier else {}),
        gate_status=FrozenMap({d: Position.CLOSED for d in config.devices()}),
        paddle_status=FrozenMap({d: Position.CLOSED for d in config.devices()}),
        entering_light_set=FrozenMap({p: DoubleLight.SINGLE_RED for p in config.pairs()}),
        leaving_light_set=FrozenMap({p: SingleLight.RED for p in config.pairs()}),
        water_equal=FrozenMap({p: False for p in config.pairs()}),
        locks_in_emergency=frozenset(),
    )
    return ControllerState(params)


# ---------------------------------------------------------------------------
# Enabled actions
# ---------------------------------------------------------------------------

def enabled(state: ControllerState, config: PlantConfig,
            alphabet: Alphabet | None = None) -> set[Action]:
    mode = state.mode
    if isinstance(mode, Emitting):
        return {mode.queue[0]}
    if isinstance(mode, Awaiting):
        return set(mode.reads_remaining[0].responses())
    alphabet = alphabet or Alphabet(config)
    return {alphabet.decode(i) for i in alphabet.stable_input_ids()}


# ---------------------------------------------------------------------------
# Step
# ---------------------------------------------------------------------------

def step(state: ControllerState, action: Action, config: PlantConfig,
         mutation: Mutation | None = None) -> ControllerState:
    """Deterministic successor; raises NotEnabledError off the enabled set."""
    mode = state.mode
    if isinstance(mode, Emitting):
        if action != mode.queue[0]:
            raise NotEnabledError("emitting %s, got %s" % (mode.queue[0].text(), action.text()))
        rest = mode.queue[1:]
        if rest:
            return ControllerState(mode.continuation, Emitting(rest, mode.continuation))
        return ControllerState(mode.continuation)
    if isinstance(mode, Awaiting):
        return _step_awaiting(state, mode, action, config, mutation)
    return _step_stable(state, action, config, mutation)


def _emit(params: ControllerParams, outputs: list[Action],
          new_params: ControllerParams) -> ControllerState:
    if not outputs:
        return ControllerState(new_params)
    return ControllerState(new_params, Emitting(tuple(outputs), new_params))


def _light_outputs(kind: ActionKind, l: LockId, s: StreamSide,
                   aspect, config: PlantConfig) -> list[Action]:
    return [Action(kind, (l, s, o, aspect)) for o in config.orientations]


def _emergency_entering_aspect(current: DoubleLight) -> DoubleLight:
    # green aspects drop to the matching red; red aspects are re-instructed as-is
    if current in (DoubleLight.SINGLE_GREEN, DoubleLight.SINGLE_RED):
        return DoubleLight.SINGLE_RED
    return DoubleLight.REDRED


def _step_stable(state: ControllerState, action: Action, config: PlantConfig,
                 mutation: Mutation | None) -> ControllerState:
    p = state.params
    kind, args = action.kind, action.args
    m = mutation

    if kind is ActionKind.SKIP:
        return state

    if kind is ActionKind.EMERGENCY_LOCK_COMMAND:
        l, cmd = args
        if cmd is EmergencyCommand.DEACTIVATE:
            return ControllerState(replace(p, locks_in_emergency=p.locks_in_emergency - {l}))
        outputs = [Action(ActionKind.GATE_ACTUATOR, (l, s, o, ActuatorCommand.DO_EMERGENCY_STOP))
                   for s in config.sides for o in config.orientations]
        outputs += [Action(ActionKind.PADDLE_ACTUATOR, (l, s, o, ActuatorCommand.DO_EMERGENCY_STOP))
                    for s in config.sides for o in config.orientations]
        new_entering = {}
        for s in config.sides:
            aspect = _emergency_entering_aspect(p.entering_light_set[(l, s)])
            new_entering[(l, s)] = aspect
            outputs += _light_outputs(ActionKind.ENTERING_LIGHT_ACTUATOR, l, s, aspect, config)
        for s in config.sides:
            outputs += _light_outputs(ActionKind.LEAVING_LIGHT_ACTUATOR, l, s, SingleLight.RED, config)
        np = replace(
            p,
            entering_light_set=p.entering_light_set.set_many(new_entering),
            leaving_light_set=p.leaving_light_set.set_many(
                {(l, s): SingleLight.RED for s in config.sides}),
            locks_in_emergency=p.locks_in_emergency | {l},
        )
        return _emit(p, outputs, np)

    if kind is ActionKind.GATE_COMMAND:
        l, s, cmd = args
        if cmd is ConsoleCommand.OPEN:
            opp = opposite(s)
            opp_closed = all(
                p.gate_status[(l, opp, o)] is Position.CLOSED
                and (p.paddle_status[(l, opp, o)] is Position.CLOSED
                     or (m and m.drop_opposite_paddle_check))
                for o in config.orientations)
            guard = (opp_closed
                     and p.entering_light_set[(l, s)] in (DoubleLight.SINGLE_RED, DoubleLight.REDRED)
                     and p.leaving_light_set[(l, s)] is SingleLight.RED
                     and (p.water_equal[(l, s)] or (m and m.drop_water_guard))
                     and l not in p.locks_in_emergency)
            if not guard:
                return state
            reads = tuple(
                [ReadSlot(ActionKind.ENTERING_LIGHT_SENSOR, (l, s, o)) for o in config.orientations]
                + [ReadSlot(ActionKind.LEAVING_LIGHT_SENSOR, (l, s, o)) for o in config.orientations])
            return ControllerState(p, Awaiting(HandlerId.GATE_OPEN, (l, s), reads))
        if cmd is ConsoleCommand.CLOSE:
            guard = (p.entering_light_set[(l, s)] in (DoubleLight.SINGLE_RED, DoubleLight.REDRED)
                     and p.leaving_light_set[(l, s)] is SingleLight.RED
                     and (l not in p.locks_in_emergency
                          or (m and m.drop_emergency_check_gate_close)))
            if not guard:
                return state
            outputs = [Action(ActionKind.GATE_ACTUATOR, (l, s, o, ActuatorCommand.DO_CLOSE))
                       for o in config.orientations]
            np = replace(p, gate_status=p.gate_status.set_many(
                {(l, s, o): Position.CLOSING for o in config.orientations}))
            return _emit(p, outputs, np)
        # stop: unconditional, position administration untouched
        outputs = [Action(ActionKind.GATE_ACTUATOR, (l, s, o, ActuatorCommand.DO_EMERGENCY_STOP))
                   for o in config.orientations]
        if not (m and m.skip_light_red_on_gate_stop):
            outputs += _light_outputs(ActionKind.ENTERING_LIGHT_ACTUATOR, l, s,
                                      DoubleLight.SINGLE_RED, config)
            outputs += _light_outputs(ActionKind.LEAVING_LIGHT_ACTUATOR, l, s,
                                      SingleLight.RED, config)
        np = replace(
            p,
            entering_light_set=p.entering_light_set.set((l, s), DoubleLight.SINGLE_RED),
            leaving_light_set=p.leaving_light_set.set((l, s), SingleLight.RED),
        )
        return _emit(p, outputs, np)

    if kind is ActionKind.PADDLE_COMMAND:
        l, s, cmd = args
        if cmd is ConsoleCommand.OPEN:
            opp = opposite(s)
            guard = (l not in p.locks_in_emergency
                     and all(p.gate_status[(l, opp, o)] is Position.CLOSED
                             and p.paddle_status[(l, opp, o)] is Position.CLOSED
                             for o in config.orientations))
            if not guard:
                return state
            outputs = [Action(ActionKind.PADDLE_ACTUATOR, (l, s, o, ActuatorCommand.DO_OPEN))
                       for o in config.orientations]
            np = replace(p, paddle_status=p.paddle_status.set_many(
                {(l, s, o): Position.OPENING for o in config.orientations}))
            return _emit(p, outputs, np)
        if cmd is ConsoleCommand.CLOSE:
            if l in p.locks_in_emergency:
                return state
            outputs = [Action(ActionKind.PADDLE_ACTUATOR, (l, s, o, ActuatorCommand.DO_CLOSE))
                       for o in config.orientations]
            np = replace(p, paddle_status=p.paddle_status.set_many(
                {(l, s, o): Position.CLOSING for o in config.orientations}))
            return _emit(p, outputs, np)
        outputs = [Action(ActionKind.PADDLE_ACTUATOR, (l, s, o, ActuatorCommand.DO_EMERGENCY_STOP))
                   for o in config.orientations]
        return _emit(p, outputs, p)

    if kind in (ActionKind.GATE_SENSOR, ActionKind.PADDLE_SENSOR):
        l, s, o, reported = args
        gate = kind is ActionKind.GATE_SENSOR
        status_map = p.gate_status if gate else p.paddle_status
        act_kind = ActionKind.GATE_ACTUATOR if gate else ActionKind.PADDLE_ACTUATOR
        current = status_map[(l, s, o)]
        new, outputs = _position_report(current, reported)
        if gate and m and m.drop_endstop_condition:
            outputs = [ActuatorCommand.DO_END_STOP_OPENING]
        out_actions = [Action(act_kind, (l, s, o, c)) for c in outputs]
        if new is current and not out_actions:
            return state
        field = "gate_status" if gate else "paddle_status"
        np = replace(p, **{field: status_map.set((l, s, o), new)})
        return _emit(p, out_actions, np)

    if kind is ActionKind.WATER_SENSOR:
        l, s, w = args
        value = w is WaterLevel.EQUAL
        if p.water_equal[(l, s)] == value:
            return state
        return ControllerState(replace(p, water_equal=p.water_equal.set((l, s), value)))

    if kind is ActionKind.ENTERING_LIGHT_COMMAND:
        l, s, c = args
        if c in (DoubleLight.SINGLE_RED, DoubleLight.REDRED):
            outputs = _light_outputs(ActionKind.ENTERING_LIGHT_ACTUATOR, l, s, c, config)
            return _emit(p, outputs, replace(
                p, entering_light_set=p.entering_light_set.set((l, s), c)))
        if c is DoubleLight.REDGREEN:
            if (p.leaving_light_set[(l, s)] is not SingleLight.RED
                    and not (m and m.drop_redgreen_guard)):
                return state
            outputs = _light_outputs(ActionKind.ENTERING_LIGHT_ACTUATOR, l, s, c, config)
            return _emit(p, outputs, replace(
                p, entering_light_set=p.entering_light_set.set((l, s), c)))
        # single_green: stored guard, then inline reads of the leaving lights
        guard = (p.leaving_light_set[(l, s)] is SingleLight.RED
                 and all(p.gate_status[(l, s, o)] is Position.OPENED
                         for o in config.orientations))
        if not guard:
            return state
        reads = tuple(ReadSlot(ActionKind.LEAVING_LIGHT_SENSOR, (l, s, o))
                      for o in config.orientations)
        return ControllerState(p, Awaiting(HandlerId.ENTERING_GREEN, (l, s), reads))

    if kind is ActionKind.LEAVING_LIGHT_COMMAND:
        l, s, c = args
        if c is SingleLight.RED:
            outputs = _light_outputs(ActionKind.LEAVING_LIGHT_ACTUATOR, l, s, c, config)
            return _emit(p, outputs, replace(
                p, leaving_light_set=p.leaving_light_set.set((l, s), c)))
        guard = (p.entering_light_set[(l, s)] in (DoubleLight.SINGLE_RED, DoubleLight.REDRED)
                 and all(p.gate_status[(l, s, o)] is Position.OPENED
                         for o in config.orientations))
        if not guard:
            return state
        reads = tuple(ReadSlot(ActionKind.ENTERING_LIGHT_SENSOR, (l, s, o))
                      for o in config.orientations)
        return ControllerState(p, Awaiting(HandlerId.LEAVING_GREEN, (l, s), reads))

    if kind is ActionKind.EMERGENCY_BARRIER_COMMAND:
        cmd, = args
        if cmd is EmergencyCommand.DEACTIVATE:
            if not p.barrier_in_emergency:
                return state
            return ControllerState(replace(p, barrier_in_emergency=False))
        outputs = [Action(ActionKind.BARRIER_ACTUATOR, (ActuatorCommand.DO_EMERGENCY_STOP,))]
        outputs += [Action(ActionKind.BARRIER_LIGHT_ACTUATOR, (s, o, SingleLight.RED))
                    for s in config.sides for o in config.orientations]
        np = replace(p, barrier_in_emergency=True,
                     barrier_light_set=p.barrier_light_set.set_many(
                         {s: SingleLight.RED for s in config.sides}))
        return _emit(p, outputs, np)

    if kind is ActionKind.BARRIER_COMMAND:
        cmd, = args
        lights_red = all(p.barrier_light_set[s] is SingleLight.RED for s in config.sides)
        if cmd is ConsoleCommand.OPEN:
            if m and m.barrier_open_unconditional:
                np = replace(p, barrier_status=Position.OPENING)
                return _emit(p, [Action(ActionKind.BARRIER_ACTUATOR,
                                        (ActuatorCommand.DO_OPEN,))], np)
            if not (lights_red and not p.barrier_in_emergency):
                return state
            reads = tuple(ReadSlot(ActionKind.BARRIER_LIGHT_SENSOR, (s, o))
                          for s in config.sides for o in config.orientations)
            return ControllerState(p, Awaiting(HandlerId.BARRIER_OPEN, (), reads))
        if cmd is ConsoleCommand.CLOSE:
            # deliberately no sensor reads: closing must not depend on the lights
            if not (lights_red and not p.barrier_in_emergency):
                return state
            np = replace(p, barrier_status=Position.CLOSING)
            return _emit(p, [Action(ActionKind.BARRIER_ACTUATOR, (ActuatorCommand.DO_CLOSE,))], np)
        outputs = [Action(ActionKind.BARRIER_ACTUATOR, (ActuatorCommand.DO_EMERGENCY_STOP,))]
        outputs += [Action(ActionKind.BARRIER_LIGHT_ACTUATOR, (s, o, SingleLight.RED))
                    for s in config.sides for o in config.orientations]
        np = replace(p, barrier_light_set=p.barrier_light_set.set_many(
            {s: SingleLight.RED for s in config.sides}))
        return _emit(p, outputs, np)

    if kind is ActionKind.BARRIER_LIGHT_COMMAND:
        s, c = args
        if c is SingleLight.GREEN and p.barrier_status is not Position.OPENED:
            return state
        outputs = [Action(ActionKind.BARRIER_LIGHT_ACTUATOR, (s, o, c))
                   for o in config.orientations]
        return _emit(p, outputs, replace(p, barrier_light_set=p.barrier_light_set.set(s, c)))

    if kind is ActionKind.BARRIER_SENSOR:
        reported, = args
        new, outputs = _position_report(p.barrier_status, reported)
        out_actions = [Action(ActionKind.BARRIER_ACTUATOR, (c,)) for c in outputs]
        if new is p.barrier_status and not out_actions:
            return state
        return _emit(p, out_actions, replace(p, barrier_status=new))

    raise NotEnabledError("action not enabled in a stable state: %s" % action.text())


def _position_report(current: Position, reported: SensorPosition):
    """Shared sensor rule for gates, paddles and the barrier.

    Returns (new stored position, actuator commands to emit).
    """
    if reported is SensorPosition.OPEN:
        if current in (Position.OPENING, Position.OPENED):
            return Position.OPENED, [ActuatorCommand.DO_END_STOP_OPENING]
        return Position.CLOSING, []
    if reported is SensorPosition.CLOSED:
        if current in (Position.CLOSING, Position.CLOSED):
            return Position.CLOSED, [ActuatorCommand.DO_END_STOP_CLOSING]
        return Position.OPENING, []
    # intermediate or failed sensor: certainty about end positions is lost
    if current is Position.OPENED:
        return Position.OPENING, []
    if current is Position.CLOSED:
        return Position.CLOSING, []
    return current, []


def _read_ok(handler: HandlerId, slot: ReadSlot, status,
             mutation: Mutation | None) -> bool:
    fail_as_red = bool(mutation and mutation.treat_fail_single_as_red)
    if handler is HandlerId.GATE_OPEN:
        if slot.kind is ActionKind.ENTERING_LIGHT_SENSOR:
            return status in (DoubleLightStatus.SHOW_SINGLE_RED,
                              DoubleLightStatus.SHOW_REDRED,
                              DoubleLightStatus.SHOW_REDGREEN)
        return status is SingleLightStatus.SHOW_RED or (
            fail_as_red and status is SingleLightStatus.FAIL)
    if handler is HandlerId.ENTERING_GREEN:
        return status is SingleLightStatus.SHOW_RED or (
            fail_as_red and status is SingleLightStatus.FAIL)
    if handler is HandlerId.LEAVING_GREEN:
        return status in (DoubleLightStatus.SHOW_SINGLE_RED, DoubleLightStatus.SHOW_REDRED)
    # barrier open
    return status is SingleLightStatus.SHOW_RED or (
        fail_as_red and status is SingleLightStatus.FAIL)


def _fire(handler: HandlerId, handler_args: tuple, p: ControllerParams,
          config: PlantConfig) -> ControllerState:
    """All inline reads passed: emit the handler's outputs."""
    if handler is HandlerId.GATE_OPEN:
        l, s = handler_args
        outputs = [Action(ActionKind.GATE_ACTUATOR, (l, s, o, ActuatorCommand.DO_OPEN))
                   for o in config.orientations]
        np = replace(p, gate_status=p.gate_status.set_many(
            {(l, s, o): Position.OPENING for o in config.orientations}))
        return _emit(p, outputs, np)
    if handler is HandlerId.ENTERING_GREEN:
        l, s = handler_args
        outputs = _light_outputs(ActionKind.ENTERING_LIGHT_ACTUATOR, l, s,
                                 DoubleLight.SINGLE_GREEN, config)
        return _emit(p, outputs, replace(
            p, entering_light_set=p.entering_light_set.set((l, s), DoubleLight.SINGLE_GREEN)))
    if handler is HandlerId.LEAVING_GREEN:
        l, s = handler_args
        outputs = _light_outputs(ActionKind.LEAVING_LIGHT_ACTUATOR, l, s,
                                 SingleLight.GREEN, config)
        return _emit(p, outputs, replace(
            p, leaving_light_set=p.leaving_light_set.set((l, s), SingleLight.GREEN)))
    outputs = [Action(ActionKind.BARRIER_ACTUATOR, (ActuatorCommand.DO_OPEN,))]
    return _emit(p, outputs, replace(p, barrier_status=Position.OPENING))


def _step_awaiting(state: ControllerState, mode: Awaiting, action: Action,
                   config: PlantConfig, mutation: Mutation | None) -> ControllerState:
    slot = mode.reads_remaining[0]
    if action.kind is not slot.kind or action.args[:-1] != slot.args:
        raise NotEnabledError("awaiting %s read, got %s" % (slot.kind.value, action.text()))
    status = action.args[-1]
    ok = mode.ok_so_far and _read_ok(mode.handler, slot, status, mutation)
    rest = mode.reads_remaining[1:]
    if rest:
        return ControllerState(state.params,
                               Awaiting(mode.handler, mode.handler_args, rest, ok))
    if not ok:
        return ControllerState(state.params)
    return _fire(mode.handler, mode.handler_args, state.params, config)


# ---------------------------------------------------------------------------
# Burst driver
# ---------------------------------------------------------------------------

def run_burst(state: ControllerState, action: Action, responder: Callable,
              config: PlantConfig, mutation: Mutation | None = None):
    """Drive one input through Awaiting/Emitting back to the next stable state.

    ``responder(slot)`` answers each pending ReadSlot with a status value.
    Returns (stable successor, outputs in emission order, [(read action, status)]).
    """
    if not state.stable:
        raise NotEnabledError("run_burst requires a stable state")
    outputs: list[Action] = []
    reads: list[tuple[Action, object]] = []
    cur = step(state, action, config, mutation)
    while not cur.stable:
        mode = cur.mode
        if isinstance(mode, Awaiting):
            slot = mode.reads_remaining[0]
            status = responder(slot)
            if not isinstance(status, slot.status_type):
                raise DomainError("responder returned ill-typed status %r for %s"
                                  % (status, slot.kind.value))
            read_action = slot.with_status(status)
            cur = step(cur, read_action, config, mutation)
            reads.append((read_action, status))
        else:
            out = mode.queue[0]
            outputs.append(out)
            cur = step(cur, out, config, mutation)
    return cur, outputs, reads
