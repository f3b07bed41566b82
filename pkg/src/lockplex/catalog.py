"""The 53 behavioural requirements: 21 safety, 12 causality, 14 operator,
6 liveness.

Safety and causality entries carry armed/disarmed window patterns; operator
entries (and the three light-obligation liveness entries) carry burst
obligations; the remaining liveness entries carry alternating-reachability
game specifications solved on the explored state graph.

Identifiers are the stable requirement names (``safreq1`` .. ``livereq6``);
``ordinal`` is the 1..53 position in the catalogue listing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from typing import Iterable

from .domain import (
    ActionKind, ActuatorCommand, Alphabet, ConsoleCommand, DoubleLight,
    DoubleLightStatus, EmergencyCommand, PlantConfig, SensorPosition,
    SingleLight, SingleLightStatus, WaterLevel, opposite,
)
from .controller import Position
from .monitor import (
    ActionPredicate, Cond, ObligationRule, ObligationSpec, OneOf, Opp,
    SafetyPattern, Var, compile_safety,
)

L, S, O = Var("l"), Var("s"), Var("o")
OPP_S = Opp("s")
LSO = (("l", "lock"), ("s", "side"), ("o", "orientation"))
LS = (("l", "lock"), ("s", "side"))
SO = (("s", "side"), ("o", "orientation"))

AC = ActuatorCommand
CC = ConsoleCommand
DL = DoubleLight
SL = SingleLight
SP = SensorPosition
DS = DoubleLightStatus
SS = SingleLightStatus

NOT_CLOSED = OneOf((SP.OPEN, SP.INTERMEDIATE, SP.FAIL))
NOT_OPEN = OneOf((SP.CLOSED, SP.INTERMEDIATE, SP.FAIL))
MOVES = OneOf((AC.DO_OPEN, AC.DO_CLOSE))
RED_SET = OneOf((DL.SINGLE_RED, DL.REDRED))
GREENISH_SET = OneOf((DL.REDGREEN, DL.SINGLE_GREEN))


def P(kind, *args):
    return ActionPredicate(kind, tuple(args))


# ---------------------------------------------------------------------------
# Liveness game specifications (alternating reachability)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LivenessSpec:
    """Controllable moves, read classes and the goal of one reachability game.

    ``allowed`` actions (operator commands plus any designated sensor inputs)
    and all actuator outputs are existential moves; inline reads matching an
    ``essential`` entry must succeed via its designated status, every other
    read is universal over all response values.
    """

    name: str
    allowed: tuple[ActionPredicate, ...]
    essential: tuple[tuple[ActionPredicate, object], ...]
    goal: tuple[ActionPredicate, ...]


@dataclass(frozen=True)
class Requirement:
    rid: str
    ordinal: int
    category: str          # safety | causality | operator | liveness
    check_kind: str        # pattern-monitor | obligation-monitor | graph-liveness
    title: str
    patterns: tuple[SafetyPattern, ...] = ()
    obligation: ObligationSpec | None = None
    liveness: Callable[[PlantConfig], list[LivenessSpec]] | None = None

    def compile(self, config: PlantConfig, alphabet: Alphabet):
        return compile_safety(self.patterns, config, alphabet, self.rid)


# ---------------------------------------------------------------------------
# Safety patterns
# ---------------------------------------------------------------------------

def _device_clear_window(sensor_kind, actuator_kind, forbidden, initial=False):
    """Opposite-device-must-be-measured-closed shape shared by safreq1..4."""
    return SafetyPattern(
        variables=LSO,
        triggers=(P(sensor_kind, L, OPP_S, O, NOT_CLOSED),
                  P(actuator_kind, L, OPP_S, O, AC.DO_OPEN)),
        blockers=(P(sensor_kind, L, OPP_S, O, SP.CLOSED),),
        forbidden=forbidden,
        initial_clause=initial,
    )


def _endstop_pattern(sensor_kind, actuator_kind, vars_, opening: bool):
    sensed, other, cmd = (SP.OPEN, NOT_OPEN, AC.DO_END_STOP_OPENING) if opening \
        else (SP.CLOSED, NOT_CLOSED, AC.DO_END_STOP_CLOSING)
    args = (L, S, O) if len(vars_) == 3 else ()
    return SafetyPattern(
        variables=vars_,
        triggers=(P(sensor_kind, *args, other),),
        blockers=(P(sensor_kind, *args, sensed),),
        forbidden=(P(actuator_kind, *args, cmd),),
        initial_clause=True,
    )


_SAFETY = [
    ("safreq1", "Opposing paddles cannot be both open simultaneously",
     [_device_clear_window(ActionKind.PADDLE_SENSOR, ActionKind.PADDLE_ACTUATOR,
                           (P(ActionKind.PADDLE_ACTUATOR, L, S, None, AC.DO_OPEN),))]),
    ("safreq2", "Paddles cannot open with an opposing gate open",
     [_device_clear_window(ActionKind.GATE_SENSOR, ActionKind.GATE_ACTUATOR,
                           (P(ActionKind.PADDLE_ACTUATOR, L, S, None, AC.DO_OPEN),))]),
    ("safreq3", "Gates cannot open with an opposing paddle open",
     [_device_clear_window(ActionKind.PADDLE_SENSOR, ActionKind.PADDLE_ACTUATOR,
                           (P(ActionKind.GATE_ACTUATOR, L, S, None, AC.DO_OPEN),))]),
    ("safreq4", "Gates cannot open with an opposing gate open",
     [_device_clear_window(ActionKind.GATE_SENSOR, ActionKind.GATE_ACTUATOR,
                           (P(ActionKind.GATE_ACTUATOR, L, S, None, AC.DO_OPEN),))]),
    ("safreq5", "Gates can only open if the waterlevel is equal",
     [SafetyPattern(
         variables=LS,
         triggers=(P(ActionKind.WATER_SENSOR, L, S, OneOf((WaterLevel.UNEQUAL,
                                                           WaterLevel.FAIL))),),
         blockers=(P(ActionKind.WATER_SENSOR, L, S, WaterLevel.EQUAL),),
         forbidden=(P(ActionKind.GATE_ACTUATOR, L, S, None, AC.DO_OPEN),),
         initial_clause=True)]),
    ("safreq6", "Traffic lights at entering and leaving side I",
     [SafetyPattern(
         variables=LSO,
         triggers=(P(ActionKind.LEAVING_LIGHT_SENSOR, L, S, O,
                     OneOf((SS.SHOW_GREEN, SS.FAIL))),
                   P(ActionKind.LEAVING_LIGHT_ACTUATOR, L, S, O, None)),
         blockers=(P(ActionKind.LEAVING_LIGHT_SENSOR, L, S, O, SS.SHOW_RED),),
         forbidden=(P(ActionKind.ENTERING_LIGHT_ACTUATOR, L, S, None, DL.SINGLE_GREEN),),
         initial_clause=True)]),
    ("safreq13", "Traffic lights at entering and leaving side II",
     [SafetyPattern(   # leaving may only go green while entering is set red
         variables=LSO,
         triggers=(P(ActionKind.ENTERING_LIGHT_ACTUATOR, L, S, O, GREENISH_SET),),
         blockers=(P(ActionKind.ENTERING_LIGHT_ACTUATOR, L, S, O, RED_SET),),
         forbidden=(P(ActionKind.LEAVING_LIGHT_ACTUATOR, L, S, None, SL.GREEN),),
         initial_clause=False),
      SafetyPattern(   # entering may only leave red while leaving is set red
         variables=LSO,
         triggers=(P(ActionKind.LEAVING_LIGHT_ACTUATOR, L, S, O, SL.GREEN),),
         blockers=(P(ActionKind.LEAVING_LIGHT_ACTUATOR, L, S, O, SL.RED),),
         forbidden=(P(ActionKind.ENTERING_LIGHT_ACTUATOR, L, S, None, GREENISH_SET),),
         initial_clause=False)]),
    ("safreq7", "Lights cannot be set to green if lock not open I",
     [SafetyPattern(
         variables=LSO,
         triggers=(P(ActionKind.GATE_SENSOR, L, S, O, NOT_OPEN),
                   P(ActionKind.GATE_ACTUATOR, L, S, O, MOVES)),
         blockers=(P(ActionKind.GATE_SENSOR, L, S, O, SP.OPEN),),
         forbidden=(P(ActionKind.ENTERING_LIGHT_ACTUATOR, L, S, None, DL.SINGLE_GREEN),),
         initial_clause=True)]),
    ("safreq14", "Lights cannot be set to green if lock not open II",
     [SafetyPattern(
         variables=LSO,
         triggers=(P(ActionKind.GATE_SENSOR, L, S, O, NOT_OPEN),
                   P(ActionKind.GATE_ACTUATOR, L, S, O, MOVES)),
         blockers=(P(ActionKind.GATE_SENSOR, L, S, O, SP.OPEN),),
         forbidden=(P(ActionKind.LEAVING_LIGHT_ACTUATOR, L, S, None, SL.GREEN),),
         initial_clause=True)]),
    ("safreq8", "Gates cannot be closed if the lights are not set to red I",
     [SafetyPattern(
         variables=LSO,
         triggers=(P(ActionKind.ENTERING_LIGHT_ACTUATOR, L, S, O, GREENISH_SET),),
         blockers=(P(ActionKind.ENTERING_LIGHT_ACTUATOR, L, S, O, RED_SET),),
         forbidden=(P(ActionKind.GATE_ACTUATOR, L, S, None, AC.DO_CLOSE),),
         initial_clause=False)]),
    ("safreq9", "Gates cannot be closed if the lights are not set to red II",
     [SafetyPattern(
         variables=LSO,
         triggers=(P(ActionKind.LEAVING_LIGHT_ACTUATOR, L, S, O, SL.GREEN),),
         blockers=(P(ActionKind.LEAVING_LIGHT_ACTUATOR, L, S, O, SL.RED),),
         forbidden=(P(ActionKind.GATE_ACTUATOR, L, S, None, AC.DO_CLOSE),),
         initial_clause=False)]),
    ("safreq10", "Gates and paddles cannot move in emergency mode",
     [SafetyPattern(
         variables=(("l", "lock"),),
         triggers=(P(ActionKind.EMERGENCY_LOCK_COMMAND, L, EmergencyCommand.ACTIVATE),),
         blockers=(P(ActionKind.EMERGENCY_LOCK_COMMAND, L, EmergencyCommand.DEACTIVATE),),
         forbidden=(P(ActionKind.GATE_ACTUATOR, L, None, None, MOVES),
                    P(ActionKind.PADDLE_ACTUATOR, L, None, None, MOVES)),
         initial_clause=False)]),
    ("safreq23", "End stop opening gate only if open",
     [_endstop_pattern(ActionKind.GATE_SENSOR, ActionKind.GATE_ACTUATOR, LSO, True)]),
    ("safreq24", "End stop closing gate only if closed",
     [_endstop_pattern(ActionKind.GATE_SENSOR, ActionKind.GATE_ACTUATOR, LSO, False)]),
    ("safreq27", "End stop opening paddle only if open",
     [_endstop_pattern(ActionKind.PADDLE_SENSOR, ActionKind.PADDLE_ACTUATOR, LSO, True)]),
    ("safreq28", "End stop closing gate only if closed",
     [_endstop_pattern(ActionKind.PADDLE_SENSOR, ActionKind.PADDLE_ACTUATOR, LSO, False)]),
    ("safreq29", "Barrier only closes when lights are red",
     [SafetyPattern(
         variables=SO,
         triggers=(P(ActionKind.BARRIER_LIGHT_ACTUATOR, S, O, SL.GREEN),),
         blockers=(P(ActionKind.BARRIER_LIGHT_ACTUATOR, S, O, SL.RED),),
         forbidden=(P(ActionKind.BARRIER_ACTUATOR, AC.DO_CLOSE),),
         initial_clause=False)]),
    ("safreq30", "Barrier lights only become green when the barrier is open",
     [SafetyPattern(
         variables=(),
         triggers=(P(ActionKind.BARRIER_SENSOR, NOT_OPEN),),
         blockers=(P(ActionKind.BARRIER_SENSOR, SP.OPEN),),
         forbidden=(P(ActionKind.BARRIER_LIGHT_ACTUATOR, None, None, SL.GREEN),),
         initial_clause=False)]),
    ("safreq40", "The barrier cannot move in emergency mode",
     [SafetyPattern(
         variables=(),
         triggers=(P(ActionKind.EMERGENCY_BARRIER_COMMAND, EmergencyCommand.ACTIVATE),),
         blockers=(P(ActionKind.EMERGENCY_BARRIER_COMMAND, EmergencyCommand.DEACTIVATE),),
         forbidden=(P(ActionKind.BARRIER_ACTUATOR, MOVES),),
         initial_clause=False)]),
    ("safreq35", "End stop opening barrier only if the barrier is open",
     [SafetyPattern(
         variables=(),
         triggers=(P(ActionKind.BARRIER_SENSOR, NOT_OPEN),),
         blockers=(P(ActionKind.BARRIER_SENSOR, SP.OPEN),),
         forbidden=(P(ActionKind.BARRIER_ACTUATOR, AC.DO_END_STOP_OPENING),),
         initial_clause=True)]),
    ("safreq36", "End stop closing barrier only if the barrier is closed",
     [SafetyPattern(
         variables=(),
         triggers=(P(ActionKind.BARRIER_SENSOR, NOT_CLOSED),),
         blockers=(P(ActionKind.BARRIER_SENSOR, SP.CLOSED),),
         forbidden=(P(ActionKind.BARRIER_ACTUATOR, AC.DO_END_STOP_CLOSING),),
         initial_clause=True)]),
]


# ---------------------------------------------------------------------------
# Causality patterns
# ---------------------------------------------------------------------------

def _caused_output(actuator_kind, vars_, device_args, causes, effect):
    return SafetyPattern(
        variables=vars_,
        triggers=(P(actuator_kind, *device_args, None),),
        blockers=tuple(causes),
        forbidden=(P(actuator_kind, *device_args, effect),),
        initial_clause=True,
    )


_CAUSALITY = [
    ("causreq11", "Emergency stop of a gate",
     [_caused_output(ActionKind.GATE_ACTUATOR, LSO, (L, S, O),
                     [P(ActionKind.GATE_COMMAND, L, S, CC.STOP),
                      P(ActionKind.EMERGENCY_LOCK_COMMAND, L, EmergencyCommand.ACTIVATE)],
                     AC.DO_EMERGENCY_STOP)]),
    ("causreq12", "Emergency stop of a paddle",
     [_caused_output(ActionKind.PADDLE_ACTUATOR, LSO, (L, S, O),
                     [P(ActionKind.PADDLE_COMMAND, L, S, CC.STOP),
                      P(ActionKind.EMERGENCY_LOCK_COMMAND, L, EmergencyCommand.ACTIVATE)],
                     AC.DO_EMERGENCY_STOP)]),
    ("causreq15", "Opening a gate",
     [_caused_output(ActionKind.GATE_ACTUATOR, LSO, (L, S, O),
                     [P(ActionKind.GATE_COMMAND, L, S, CC.OPEN)], AC.DO_OPEN)]),
    ("causreq16", "Closing a gate",
     [_caused_output(ActionKind.GATE_ACTUATOR, LSO, (L, S, O),
                     [P(ActionKind.GATE_COMMAND, L, S, CC.CLOSE)], AC.DO_CLOSE)]),
    ("causreq17", "Opening a paddle",
     [_caused_output(ActionKind.PADDLE_ACTUATOR, LSO, (L, S, O),
                     [P(ActionKind.PADDLE_COMMAND, L, S, CC.OPEN)], AC.DO_OPEN)]),
    ("causreq18", "Closing a paddle",
     [_caused_output(ActionKind.PADDLE_ACTUATOR, LSO, (L, S, O),
                     [P(ActionKind.PADDLE_COMMAND, L, S, CC.CLOSE)], AC.DO_CLOSE)]),
    ("causreq19", "Setting the entering lights in a lock",
     [_caused_output(ActionKind.ENTERING_LIGHT_ACTUATOR, LSO, (L, S, O),
                     [P(ActionKind.ENTERING_LIGHT_COMMAND, L, S, DL.SINGLE_RED),
                      P(ActionKind.EMERGENCY_LOCK_COMMAND, L, EmergencyCommand.ACTIVATE),
                      P(ActionKind.GATE_COMMAND, L, S, CC.STOP)], DL.SINGLE_RED),
      _caused_output(ActionKind.ENTERING_LIGHT_ACTUATOR, LSO, (L, S, O),
                     [P(ActionKind.ENTERING_LIGHT_COMMAND, L, S, DL.REDRED),
                      P(ActionKind.EMERGENCY_LOCK_COMMAND, L, EmergencyCommand.ACTIVATE)],
                     DL.REDRED),
      _caused_output(ActionKind.ENTERING_LIGHT_ACTUATOR, LSO, (L, S, O),
                     [P(ActionKind.ENTERING_LIGHT_COMMAND, L, S, DL.REDGREEN)],
                     DL.REDGREEN),
      _caused_output(ActionKind.ENTERING_LIGHT_ACTUATOR, LSO, (L, S, O),
                     [P(ActionKind.ENTERING_LIGHT_COMMAND, L, S, DL.SINGLE_GREEN)],
                     DL.SINGLE_GREEN)]),
    ("causreq20", "Setting the leaving lights in a lock",
     [_caused_output(ActionKind.LEAVING_LIGHT_ACTUATOR, LSO, (L, S, O),
                     [P(ActionKind.LEAVING_LIGHT_COMMAND, L, S, SL.RED),
                      P(ActionKind.EMERGENCY_LOCK_COMMAND, L, EmergencyCommand.ACTIVATE),
                      P(ActionKind.GATE_COMMAND, L, S, CC.STOP)], SL.RED),
      _caused_output(ActionKind.LEAVING_LIGHT_ACTUATOR, LSO, (L, S, O),
                     [P(ActionKind.LEAVING_LIGHT_COMMAND, L, S, SL.GREEN)], SL.GREEN)]),
    ("causreq31", "Setting the lights of the barrier",
     [_caused_output(ActionKind.BARRIER_LIGHT_ACTUATOR, SO, (S, O),
                     [P(ActionKind.BARRIER_LIGHT_COMMAND, S, SL.RED),
                      P(ActionKind.EMERGENCY_BARRIER_COMMAND, EmergencyCommand.ACTIVATE),
                      P(ActionKind.BARRIER_COMMAND, CC.STOP)], SL.RED),
      _caused_output(ActionKind.BARRIER_LIGHT_ACTUATOR, SO, (S, O),
                     [P(ActionKind.BARRIER_LIGHT_COMMAND, S, SL.GREEN)], SL.GREEN)]),
    ("causreq32", "Opening the barrier",
     [_caused_output(ActionKind.BARRIER_ACTUATOR, (), (),
                     [P(ActionKind.BARRIER_COMMAND, CC.OPEN)], AC.DO_OPEN)]),
    ("causreq33", "Closing the barrier",
     [_caused_output(ActionKind.BARRIER_ACTUATOR, (), (),
                     [P(ActionKind.BARRIER_COMMAND, CC.CLOSE)], AC.DO_CLOSE)]),
    ("causreq34", "Stopping the barrier",
     [_caused_output(ActionKind.BARRIER_ACTUATOR, (), (),
                     [P(ActionKind.EMERGENCY_BARRIER_COMMAND, EmergencyCommand.ACTIVATE),
                      P(ActionKind.BARRIER_COMMAND, CC.STOP)], AC.DO_EMERGENCY_STOP)]),
]


# ---------------------------------------------------------------------------
# Operator obligations
# ---------------------------------------------------------------------------

def _for_orientations(kind, binding, config, *fixed_prefix, value):
    l, s = binding["l"], binding["s"]
    return [ActionPredicate(kind, (l, s, o, value)) for o in config.orientations]


def _rule(variables, trigger, enabling, obligations, suppressions=()):
    return ObligationRule(tuple(variables), trigger, tuple(enabling),
                          obligations, tuple(suppressions))


def _barrier_lights_red(b, config):
    return [ActionPredicate(ActionKind.BARRIER_LIGHT_ACTUATOR, (s, o, SL.RED))
            for s in config.sides for o in config.orientations]


BAD_DOUBLE_READ = P(ActionKind.ENTERING_LIGHT_SENSOR, Var("l"), Var("s"), None,
                    OneOf((DS.SHOW_SINGLE_GREEN, DS.FAIL)))
BAD_DOUBLE_READ_STRICT = P(ActionKind.ENTERING_LIGHT_SENSOR, Var("l"), Var("s"), None,
                           OneOf((DS.SHOW_SINGLE_GREEN, DS.SHOW_REDGREEN, DS.FAIL)))
BAD_SINGLE_READ = P(ActionKind.LEAVING_LIGHT_SENSOR, Var("l"), Var("s"), None,
                    OneOf((SS.SHOW_GREEN, SS.FAIL)))
BAD_BARRIER_READ = P(ActionKind.BARRIER_LIGHT_SENSOR, None, None,
                     OneOf((SS.SHOW_GREEN, SS.FAIL)))


def _obl(rid, rules):
    return ObligationSpec(rid, tuple(rules))


_OPERATOR = [
    ("commandreq1", "Close command for the barrier", _obl("commandreq1", [
        _rule((), P(ActionKind.BARRIER_COMMAND, CC.CLOSE),
              [Cond("barrier_lights_red"), Cond("not_barrier_emergency")],
              lambda b, c: [P(ActionKind.BARRIER_ACTUATOR, AC.DO_CLOSE)])])),
    ("commandreq2", "Open command for the barrier", _obl("commandreq2", [
        _rule((), P(ActionKind.BARRIER_COMMAND, CC.OPEN),
              [Cond("barrier_lights_red"), Cond("not_barrier_emergency")],
              lambda b, c: [P(ActionKind.BARRIER_ACTUATOR, AC.DO_OPEN)],
              [BAD_BARRIER_READ])])),
    ("commandreq3", "Stop command for the barrier", _obl("commandreq3", [
        _rule((), P(ActionKind.BARRIER_COMMAND, CC.STOP), [],
              lambda b, c: [P(ActionKind.BARRIER_ACTUATOR, AC.DO_EMERGENCY_STOP)]
              + _barrier_lights_red(b, c))])),
    ("commandreq4", "Emergency command for the barrier", _obl("commandreq4", [
        _rule((), P(ActionKind.EMERGENCY_BARRIER_COMMAND, EmergencyCommand.ACTIVATE), [],
              lambda b, c: [P(ActionKind.BARRIER_ACTUATOR, AC.DO_EMERGENCY_STOP)]
              + _barrier_lights_red(b, c))])),
    ("commandreq5", "Lights command for the barrier", _obl("commandreq5", [
        _rule((("s", "side"),), P(ActionKind.BARRIER_LIGHT_COMMAND, S, SL.RED), [],
              lambda b, c: [ActionPredicate(ActionKind.BARRIER_LIGHT_ACTUATOR,
                                            (b["s"], o, SL.RED)) for o in c.orientations]),
        _rule((("s", "side"),), P(ActionKind.BARRIER_LIGHT_COMMAND, S, SL.GREEN),
              [Cond("barrier_is", (Position.OPENED,))],
              lambda b, c: [ActionPredicate(ActionKind.BARRIER_LIGHT_ACTUATOR,
                                            (b["s"], o, SL.GREEN)) for o in c.orientations])])),
    ("commandreq6", "Close command for gates", _obl("commandreq6", [
        _rule(LS, P(ActionKind.GATE_COMMAND, L, S, CC.CLOSE),
              [Cond("entering_in", (DL.SINGLE_RED, DL.REDRED)),
               Cond("leaving_is", (SL.RED,)), Cond("not_lock_emergency")],
              lambda b, c: _for_orientations(ActionKind.GATE_ACTUATOR, b, c,
                                             value=AC.DO_CLOSE))])),
    ("commandreq7", "Open command for gates", _obl("commandreq7", [
        _rule(LS, P(ActionKind.GATE_COMMAND, L, S, CC.OPEN),
              [Cond("opposite_closed"), Cond("entering_in", (DL.SINGLE_RED, DL.REDRED)),
               Cond("leaving_is", (SL.RED,)), Cond("water_equal"),
               Cond("not_lock_emergency")],
              lambda b, c: _for_orientations(ActionKind.GATE_ACTUATOR, b, c,
                                             value=AC.DO_OPEN),
              [BAD_DOUBLE_READ, BAD_SINGLE_READ])])),
    ("commandreq8", "Stop command for gates", _obl("commandreq8", [
        _rule(LS, P(ActionKind.GATE_COMMAND, L, S, CC.STOP), [],
              lambda b, c: _for_orientations(ActionKind.GATE_ACTUATOR, b, c,
                                             value=AC.DO_EMERGENCY_STOP)
              + _for_orientations(ActionKind.ENTERING_LIGHT_ACTUATOR, b, c,
                                  value=DL.SINGLE_RED)
              + _for_orientations(ActionKind.LEAVING_LIGHT_ACTUATOR, b, c,
                                  value=SL.RED))])),
    ("commandreq9", "Close command for paddles", _obl("commandreq9", [
        _rule(LS, P(ActionKind.PADDLE_COMMAND, L, S, CC.CLOSE),
              [Cond("not_lock_emergency")],
              lambda b, c: _for_orientations(ActionKind.PADDLE_ACTUATOR, b, c,
                                             value=AC.DO_CLOSE))])),
    ("commandreq10", "Open command for paddles", _obl("commandreq10", [
        _rule(LS, P(ActionKind.PADDLE_COMMAND, L, S, CC.OPEN),
              [Cond("not_lock_emergency"), Cond("opposite_closed")],
              lambda b, c: _for_orientations(ActionKind.PADDLE_ACTUATOR, b, c,
                                             value=AC.DO_OPEN))])),
    ("commandreq11", "Stop command for paddles", _obl("commandreq11", [
        _rule(LS, P(ActionKind.PADDLE_COMMAND, L, S, CC.STOP), [],
              lambda b, c: _for_orientations(ActionKind.PADDLE_ACTUATOR, b, c,
                                             value=AC.DO_EMERGENCY_STOP))])),
    ("commandreq12", "Emergency command for a lock", _obl("commandreq12", [
        _rule((("l", "lock"),),
              P(ActionKind.EMERGENCY_LOCK_COMMAND, L, EmergencyCommand.ACTIVATE), [],
              lambda b, c: [ActionPredicate(ActionKind.GATE_ACTUATOR,
                                            (b["l"], s, o, AC.DO_EMERGENCY_STOP))
                            for s in c.sides for o in c.orientations]
              + [ActionPredicate(ActionKind.PADDLE_ACTUATOR,
                                 (b["l"], s, o, AC.DO_EMERGENCY_STOP))
                 for s in c.sides for o in c.orientations]
              + [ActionPredicate(ActionKind.ENTERING_LIGHT_ACTUATOR,
                                 (b["l"], s, o, RED_SET))
                 for s in c.sides for o in c.orientations]
              + [ActionPredicate(ActionKind.LEAVING_LIGHT_ACTUATOR,
                                 (b["l"], s, o, SL.RED))
                 for s in c.sides for o in c.orientations])])),
    ("commandreq13", "Leaving lights commands for a lock", _obl("commandreq13", [
        _rule(LS, P(ActionKind.LEAVING_LIGHT_COMMAND, L, S, SL.RED), [],
              lambda b, c: _for_orientations(ActionKind.LEAVING_LIGHT_ACTUATOR, b, c,
                                             value=SL.RED)),
        _rule(LS, P(ActionKind.LEAVING_LIGHT_COMMAND, L, S, SL.GREEN),
              [Cond("entering_in", (DL.SINGLE_RED, DL.REDRED)),
               Cond("gates_are", (Position.OPENED,))],
              lambda b, c: _for_orientations(ActionKind.LEAVING_LIGHT_ACTUATOR, b, c,
                                             value=SL.GREEN),
              [BAD_DOUBLE_READ_STRICT])])),
    ("commandreq14", "Entering lights commands for a lock", _obl("commandreq14", [
        _rule(LS, P(ActionKind.ENTERING_LIGHT_COMMAND, L, S, DL.SINGLE_RED), [],
              lambda b, c: _for_orientations(ActionKind.ENTERING_LIGHT_ACTUATOR, b, c,
                                             value=DL.SINGLE_RED)),
        _rule(LS, P(ActionKind.ENTERING_LIGHT_COMMAND, L, S, DL.REDRED), [],
              lambda b, c: _for_orientations(ActionKind.ENTERING_LIGHT_ACTUATOR, b, c,
                                             value=DL.REDRED)),
        _rule(LS, P(ActionKind.ENTERING_LIGHT_COMMAND, L, S, DL.REDGREEN),
              [Cond("leaving_is", (SL.RED,))],
              lambda b, c: _for_orientations(ActionKind.ENTERING_LIGHT_ACTUATOR, b, c,
                                             value=DL.REDGREEN)),
        _rule(LS, P(ActionKind.ENTERING_LIGHT_COMMAND, L, S, DL.SINGLE_GREEN),
              [Cond("leaving_is", (SL.RED,)), Cond("gates_are", (Position.OPENED,))],
              lambda b, c: _for_orientations(ActionKind.ENTERING_LIGHT_ACTUATOR, b, c,
                                             value=DL.SINGLE_GREEN),
              [BAD_SINGLE_READ])])),
]


# ---------------------------------------------------------------------------
# Liveness
# ---------------------------------------------------------------------------

def _livereq1_specs(config: PlantConfig) -> list[LivenessSpec]:
    if not config.include_barrier:
        return []
    allowed = (
        P(ActionKind.BARRIER_COMMAND, CC.CLOSE),
        P(ActionKind.BARRIER_LIGHT_COMMAND, None, SL.RED),
        P(ActionKind.ENTERING_LIGHT_COMMAND, None, None, RED_SET),
        P(ActionKind.LEAVING_LIGHT_COMMAND, None, None, SL.RED),
        P(ActionKind.EMERGENCY_BARRIER_COMMAND, EmergencyCommand.DEACTIVATE),
        P(ActionKind.EMERGENCY_LOCK_COMMAND, None, EmergencyCommand.DEACTIVATE),
        P(ActionKind.SKIP),
    )
    return [LivenessSpec("livereq1", allowed, (),
                         (P(ActionKind.BARRIER_ACTUATOR, AC.DO_CLOSE),))]


def _livereq2_specs(config: PlantConfig) -> list[LivenessSpec]:
    out = []
    for l, s in config.pairs():
        allowed = (
            ActionPredicate(ActionKind.GATE_COMMAND, (l, s, CC.CLOSE)),
            ActionPredicate(ActionKind.ENTERING_LIGHT_COMMAND, (l, s, DL.SINGLE_RED)),
            ActionPredicate(ActionKind.ENTERING_LIGHT_COMMAND, (l, s, DL.REDRED)),
            ActionPredicate(ActionKind.LEAVING_LIGHT_COMMAND, (l, s, SL.RED)),
            ActionPredicate(ActionKind.EMERGENCY_LOCK_COMMAND,
                            (l, EmergencyCommand.DEACTIVATE)),
            P(ActionKind.SKIP),
        )
        goal = (ActionPredicate(ActionKind.GATE_ACTUATOR, (l, s, None, AC.DO_CLOSE)),)
        out.append(LivenessSpec("livereq2[%s,%s]" % (l.value, s.value),
                                allowed, (), goal))
    return out


def _livereq3_specs(config: PlantConfig) -> list[LivenessSpec]:
    out = []
    for l, s in config.pairs():
        opp = opposite(s)
        allowed = (
            ActionPredicate(ActionKind.GATE_COMMAND, (l, opp, CC.CLOSE)),
            ActionPredicate(ActionKind.GATE_COMMAND, (l, s, CC.OPEN)),
            ActionPredicate(ActionKind.PADDLE_COMMAND, (l, opp, CC.CLOSE)),
            ActionPredicate(ActionKind.PADDLE_COMMAND, (l, s, CC.OPEN)),
            ActionPredicate(ActionKind.PADDLE_COMMAND, (l, s, CC.CLOSE)),
            ActionPredicate(ActionKind.ENTERING_LIGHT_COMMAND, (l, None, DL.SINGLE_RED)),
            ActionPredicate(ActionKind.LEAVING_LIGHT_COMMAND, (l, None, SL.RED)),
            ActionPredicate(ActionKind.EMERGENCY_LOCK_COMMAND,
                            (l, EmergencyCommand.DEACTIVATE)),
            P(ActionKind.SKIP),
            # designated environment help: the sensors this passage depends on
            ActionPredicate(ActionKind.WATER_SENSOR, (l, s, WaterLevel.EQUAL)),
            ActionPredicate(ActionKind.GATE_SENSOR, (l, opp, None, SP.CLOSED)),
            ActionPredicate(ActionKind.PADDLE_SENSOR, (l, opp, None, SP.CLOSED)),
        )
        essential = (
            (ActionPredicate(ActionKind.ENTERING_LIGHT_SENSOR, (l, s, None, None)),
             DS.SHOW_SINGLE_RED),
            (ActionPredicate(ActionKind.LEAVING_LIGHT_SENSOR, (l, s, None, None)),
             SS.SHOW_RED),
        )
        goal = (ActionPredicate(ActionKind.GATE_ACTUATOR, (l, s, None, AC.DO_OPEN)),)
        out.append(LivenessSpec("livereq3[%s,%s]" % (l.value, s.value),
                                allowed, essential, goal))
    return out


_LIVENESS = [
    ("livereq1", "The barrier can always be closed", "graph-liveness",
     None, _livereq1_specs),
    ("livereq2", "Gates can always be closed", "graph-liveness",
     None, _livereq2_specs),
    ("livereq3", "Ships can pass", "graph-liveness",
     None, _livereq3_specs),
    ("livereq4", "Stopping gates prematurely", "obligation-monitor",
     _obl("livereq4", [
         _rule(LS, P(ActionKind.GATE_COMMAND, L, S, CC.STOP),
               [Cond("entering_in", (DL.REDGREEN,))],
               lambda b, c: _for_orientations(ActionKind.ENTERING_LIGHT_ACTUATOR, b, c,
                                              value=DL.SINGLE_RED))]), None),
    ("livereq5", "Emergency stop of the lock", "obligation-monitor",
     _obl("livereq5", [
         _rule((("l", "lock"),),
               P(ActionKind.EMERGENCY_LOCK_COMMAND, L, EmergencyCommand.ACTIVATE), [],
               lambda b, c: [ActionPredicate(ActionKind.ENTERING_LIGHT_ACTUATOR,
                                             (b["l"], s, o, RED_SET))
                             for s in c.sides for o in c.orientations]
               + [ActionPredicate(ActionKind.LEAVING_LIGHT_ACTUATOR,
                                  (b["l"], s, o, SL.RED))
                  for s in c.sides for o in c.orientations])]), None),
    ("livereq6", "Emergency stop of the barrier", "obligation-monitor",
     _obl("livereq6", [
         _rule((), P(ActionKind.EMERGENCY_BARRIER_COMMAND, EmergencyCommand.ACTIVATE),
               [], _barrier_lights_red)]), None),
]


# ---------------------------------------------------------------------------
# Catalog assembly
# ---------------------------------------------------------------------------

class RequirementCatalog(dict):
    """Ordered mapping rid -> Requirement with category helpers."""

    def by_category(self, category: str) -> list[Requirement]:
        return [r for r in self.values() if r.category == category]

    def select(self, names: Iterable[str]) -> list[Requirement]:
        out: list[Requirement] = []
        for name in names:
            name = name.strip()
            if name == "all":
                out.extend(self.values())
            elif name.startswith("all-"):
                cat = name[4:]
                picked = self.by_category(cat)
                if not picked:
                    raise KeyError("unknown requirement category: %r" % cat)
                out.extend(picked)
            elif name in self:
                out.append(self[name])
            else:
                raise KeyError("unknown requirement id: %r" % name)
        seen, uniq = set(), []
        for r in out:
            if r.rid not in seen:
                seen.add(r.rid)
                uniq.append(r)
        return uniq


def catalog() -> RequirementCatalog:
    cat = RequirementCatalog()
    ordinal = 1
    for rid, title, patterns in _SAFETY:
        cat[rid] = Requirement(rid, ordinal, "safety", "pattern-monitor", title,
                               patterns=tuple(patterns))
        ordinal += 1
    for rid, title, patterns in _CAUSALITY:
        cat[rid] = Requirement(rid, ordinal, "causality", "pattern-monitor", title,
                               patterns=tuple(patterns))
        ordinal += 1
    for rid, title, spec in _OPERATOR:
        cat[rid] = Requirement(rid, ordinal, "operator", "obligation-monitor", title,
                               obligation=spec)
        ordinal += 1
    for rid, title, kind, spec, live in _LIVENESS:
        cat[rid] = Requirement(rid, ordinal, "liveness", kind, title,
                               obligation=spec, liveness=live)
        ordinal += 1
    return cat
