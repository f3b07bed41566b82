import io

from lockplex.catalog import catalog
from lockplex.domain import ActionKind, PlantConfig, StreamSide
from lockplex.monitor import check_trace
from lockplex.sim import (
    ClosedLoop, Scenario, ScenarioEvent, random_commands, simulate,
)
from lockplex.traces import read_trace, validate, write_trace

FULL = PlantConfig.full()
CAT = catalog()


def trace_bytes(records):
    buf = io.StringIO()
    write_trace(buf, records)
    return buf.getvalue()


def scripted(seed=3, ticks=400, rate=0.25):
    return Scenario(seed, tuple(random_commands(FULL, ticks, rate, seed)))


def test_trace_format_round_trip():
    loop = simulate(FULL, scripted(ticks=60), 60)
    text = trace_bytes(loop.records)
    back = list(read_trace(io.StringIO(text)))
    assert back == loop.records
    validate(back)


def test_closed_loop_replay_is_byte_identical():
    scenario = scripted()
    a = simulate(FULL, scenario, 400)
    b = simulate(FULL, scenario, 400)
    assert trace_bytes(a.records) == trace_bytes(b.records)


def test_different_seeds_differ():
    a = simulate(FULL, scripted(seed=1), 200)
    b = simulate(FULL, scripted(seed=2), 200)
    assert trace_bytes(a.records) != trace_bytes(b.records)


def test_scenario_parse_save_round_trip(tmp_path):
    scenario = Scenario(9, (
        ScenarioEvent(2, "command", "GateCommand(north,upstream,command_open)"),
        ScenarioEvent(5, "fault_on", "sensor_fail water(north,upstream)"),
        ScenarioEvent(9, "fault_off", "sensor_fail water(north,upstream)"),
    ))
    path = tmp_path / "s.scenario"
    scenario.save(path)
    again = Scenario.load(path)
    assert again == scenario


def test_sequence_numbers_are_gapless():
    loop = simulate(FULL, scripted(ticks=120), 120)
    validate(loop.records)


def test_physical_safety_oracle_no_faults():
    # fault-free closed loop: no gate physically open together with an
    # opposite-side gate or paddle of the same lock
    scenario = scripted(seed=21, ticks=1500, rate=0.4)
    loop = ClosedLoop(FULL, scenario.seed)
    pending = list(scenario.events)
    i = 0
    for t in range(1, 1501):
        while i < len(pending) and pending[i].tick == t:
            loop.apply_event(pending[i])
            i += 1
        loop.do_tick()
        plant = loop.plant
        for l in FULL.locks:
            for s in FULL.sides:
                opp = StreamSide.DOWNSTREAM if s is StreamSide.UPSTREAM else StreamSide.UPSTREAM
                this_open = any(plant.position[("gate", l, s, o)] > 0
                                for o in FULL.orientations)
                opp_open = any(plant.position[(n, l, opp, o)] > 0
                               for n in ("gate", "paddle") for o in FULL.orientations)
                assert not (this_open and opp_open), (t, l, s)


def test_sensor_events_match_physical_state_without_faults():
    scenario = scripted(seed=8, ticks=600, rate=0.3)
    loop = ClosedLoop(FULL, scenario.seed)

    checked = []

    def run_and_check():
        pending = list(scenario.events)
        i = 0
        for t in range(1, 601):
            while i < len(pending) and pending[i].tick == t:
                loop.apply_event(pending[i])
                i += 1
            before = dict(loop.plant.position), dict(loop.plant.water)
            loop.tick_count += 1
            events = loop.plant.tick()
            for e in events:
                if e.kind in (ActionKind.GATE_SENSOR, ActionKind.PADDLE_SENSOR):
                    name = "gate" if e.kind is ActionKind.GATE_SENSOR else "paddle"
                    pos = loop.plant.position[(name,) + e.args[:3]]
                    val = e.args[3].value
                    expect = {0: "sense_closed", 10: "sense_open"}.get(pos, "sense_intermediate")
                    assert val == expect
                    checked.append(e)
                elif e.kind is ActionKind.WATER_SENSOR:
                    diff = loop.plant.water[e.args[:2]]
                    assert e.args[2].value == ("equal" if diff == 0 else "unequal")
                    checked.append(e)
                loop.submit(e)
    run_and_check()
    assert len(checked) > 50  # the run exercised real sensor traffic


def test_closed_loop_traces_satisfy_all_monitors_with_faults():
    # fault injection may confuse the plant, never the requirement monitors
    events = list(random_commands(FULL, 800, 0.3, 77))
    events += [
        ScenarioEvent(40, "fault_on", "stuck_aspect(green) leaving_light(north,upstream,east)"),
        ScenarioEvent(80, "fault_on", "sensor_fail water(south,downstream)"),
        ScenarioEvent(120, "fault_on", "motor_stall gate(north,upstream,east)"),
        ScenarioEvent(400, "fault_off", "motor_stall gate(north,upstream,east)"),
    ]
    scenario = Scenario(77, tuple(sorted(events, key=lambda e: e.tick)))
    loop = simulate(FULL, scenario, 800)
    reqs = [r for r in CAT.values() if r.check_kind != "graph-liveness"]
    verdicts = check_trace(loop.records, reqs, FULL)
    bad = [v for v in verdicts if not v.ok]
    assert not bad, [(v.requirement_id, v.witness_seq) for v in bad]


def test_random_fault_profile_is_deterministic():
    profile = {"sensor_fail": 0.01, "stuck_aspect": 0.005, "motor_stall": 0.002}
    scenario = scripted(seed=5, ticks=300)
    a = simulate(FULL, scenario, 300, profile=profile)
    b = simulate(FULL, scenario, 300, profile=profile)
    assert trace_bytes(a.records) == trace_bytes(b.records)
    assert a.plant.faults == b.plant.faults
