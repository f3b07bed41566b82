import pytest

from lockplex.domain import (
    ActionKind, DomainError, DoubleLightStatus, LockId, Orientation,
    PlantConfig, SingleLight, SingleLightStatus, StreamSide, parse_action,
)
from lockplex.controller import ReadSlot
from lockplex.plant import (
    Fault, FaultKind, HEARTBEAT, Motion, TRAVEL, WATER_MAX, parse_fault,
    plant_init,
)

FULL = PlantConfig.full()
N, UP, E = LockId.NORTH, StreamSide.UPSTREAM, Orientation.EAST
GATE = ("gate", N, UP, E)


def act(text):
    return parse_action(text)


def test_initial_plant():
    plant = plant_init(FULL)
    assert plant.faults == {}
    assert plant.position[("barrier",)] == TRAVEL
    gates = [k for k in plant.position if k[0] == "gate"]
    assert len(gates) == 8 and all(plant.position[k] == 0 for k in gates)
    assert all(v == WATER_MAX for v in plant.water.values())


def test_invalid_profile_rejected():
    with pytest.raises(DomainError):
        plant_init(FULL, profile={"sensor_fail": 2.0})


def test_actuators_drive_motion_and_stops_freeze():
    plant = plant_init(FULL)
    plant.apply(act("GateActuator(north,upstream,east,do_open)"))
    assert plant.motion[GATE] is Motion.OPENING
    for _ in range(3):
        plant.tick()
    assert plant.position[GATE] == 3
    plant.apply(act("GateActuator(north,upstream,east,do_emergencyStop)"))
    assert plant.motion[GATE] is Motion.STILL
    pos = plant.position[GATE]
    plant.tick()
    assert plant.position[GATE] == pos  # still devices keep their position


def test_motor_stall_ignores_motion_commands():
    plant = plant_init(FULL)
    plant.inject_fault(Fault(GATE, FaultKind.MOTOR_STALL))
    plant.apply(act("GateActuator(north,upstream,east,do_open)"))
    assert plant.motion[GATE] is Motion.STILL


def test_stuck_aspect_ignores_light_commands():
    plant = plant_init(FULL)
    key = ("leaving_light", N, UP, E)
    plant.aspect[key] = SingleLight.GREEN
    plant.inject_fault(Fault(key, FaultKind.STUCK_ASPECT, SingleLight.GREEN))
    plant.apply(act("LeavingTrafficLightActuator(north,upstream,east,red)"))
    assert plant.aspect[key] is SingleLight.GREEN


def test_threshold_crossing_emits_open_event():
    plant = plant_init(FULL)
    plant.position[GATE] = TRAVEL - 1
    plant.motion[GATE] = Motion.OPENING
    events = plant.tick()
    assert act("GateSensor(north,upstream,east,sense_open)") in events
    assert plant.position[GATE] == TRAVEL


def test_quiescent_plant_emits_nothing():
    plant = plant_init(FULL)
    plant.water = {k: 0 for k in plant.water}  # no differential to relax
    for _ in range(HEARTBEAT - 1):
        assert plant.tick() == []


def test_heartbeat_rereports_everything():
    plant = plant_init(FULL)
    events = []
    for _ in range(HEARTBEAT):
        events = plant.tick()
    kinds = {e.kind for e in events}
    assert ActionKind.GATE_SENSOR in kinds
    assert ActionKind.BARRIER_SENSOR in kinds
    assert ActionKind.WATER_SENSOR in kinds
    assert act("GateSensor(north,upstream,east,sense_closed)") in events
    assert act("BarrierSensor(sense_open)") in events


def test_water_relaxes_through_open_paddle_and_reports_equal():
    plant = plant_init(FULL)
    plant.apply(act("PaddleActuator(north,upstream,east,do_open)"))
    seen = []
    for _ in range(WATER_MAX + TRAVEL + 2):
        seen.extend(plant.tick())
    assert act("WaterSensor(north,upstream,equal)") in seen
    assert plant.water[(N, UP)] == 0


def test_failed_water_sensor_reports_fail():
    plant = plant_init(FULL)
    plant.inject_fault(Fault(("water", N, UP), FaultKind.SENSOR_FAIL))
    plant.apply(act("PaddleActuator(north,upstream,east,do_open)"))
    seen = []
    for _ in range(WATER_MAX + TRAVEL + 2):
        seen.extend(plant.tick())
    assert act("WaterSensor(north,upstream,fail_water_sensor)") in seen
    assert act("WaterSensor(north,upstream,equal)") not in seen


def test_failed_position_sensor_reports_fail():
    plant = plant_init(FULL)
    plant.inject_fault(Fault(GATE, FaultKind.SENSOR_FAIL))
    plant.apply(act("GateActuator(north,upstream,east,do_open)"))
    seen = []
    for _ in range(TRAVEL + 1):
        seen.extend(plant.tick())
    assert act("GateSensor(north,upstream,east,fail_position)") in seen
    assert act("GateSensor(north,upstream,east,sense_open)") not in seen


def test_respond_physical_aspect_and_failures():
    plant = plant_init(FULL)
    leaving = ReadSlot(ActionKind.LEAVING_LIGHT_SENSOR, (N, UP, E))
    assert plant.respond(leaving) is SingleLightStatus.SHOW_RED
    entering = ReadSlot(ActionKind.ENTERING_LIGHT_SENSOR, (N, UP, E))
    plant.inject_fault(Fault(("entering_light", N, UP, E), FaultKind.SENSOR_FAIL))
    assert plant.respond(entering) is DoubleLightStatus.FAIL
    # stuck green light with a healthy sensor keeps reporting green
    key = ("leaving_light", N, UP, E)
    plant.aspect[key] = SingleLight.GREEN
    plant.inject_fault(Fault(key, FaultKind.STUCK_ASPECT, SingleLight.GREEN))
    plant.apply(act("LeavingTrafficLightActuator(north,upstream,east,red)"))
    assert plant.respond(leaving) is SingleLightStatus.SHOW_GREEN


def test_respond_rejects_non_light_reads():
    plant = plant_init(FULL)
    with pytest.raises(DomainError):
        plant.respond(ReadSlot(ActionKind.GATE_SENSOR, (N, UP, E)))


def test_fault_injection_idempotent_add_remove():
    plant = plant_init(FULL)
    f = Fault(GATE, FaultKind.SENSOR_FAIL)
    plant.inject_fault(f)
    plant.inject_fault(f)          # idempotent re-add
    assert plant.faults == {GATE: f}
    g = Fault(("paddle", N, UP, E), FaultKind.MOTOR_STALL)
    plant.inject_fault(g)
    assert len(plant.faults) == 2  # distinct targets coexist
    plant.inject_fault(f, on=False)
    assert plant.faults == {("paddle", N, UP, E): g}


def test_conflicting_fault_kind_rejected():
    plant = plant_init(FULL)
    plant.inject_fault(Fault(GATE, FaultKind.SENSOR_FAIL))
    with pytest.raises(DomainError):
        plant.inject_fault(Fault(GATE, FaultKind.MOTOR_STALL))


def test_fault_target_outside_config_rejected():
    plant = plant_init(PlantConfig.mini())
    with pytest.raises(DomainError):
        plant.inject_fault(Fault(("barrier",), FaultKind.MOTOR_STALL))
    with pytest.raises(DomainError):
        plant.inject_fault(parse_fault("sensor_fail gate(south,upstream,east)"))


def test_fault_text_round_trip():
    for text in ["sensor_fail water(north,upstream)",
                 "stuck_aspect(green) leaving_light(north,upstream,east)",
                 "stuck_aspect(redgreen) entering_light(south,downstream,west)",
                 "motor_stall barrier"]:
        f = parse_fault(text)
        assert f.text() == text
        assert parse_fault(f.text()) == f
