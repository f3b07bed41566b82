from lockplex.catalog import catalog
from lockplex.domain import Alphabet, ActuatorCommand, PlantConfig, parse_action

CAT = catalog()
FULL = PlantConfig.full()
ALPH = Alphabet(FULL)


def test_category_counts():
    assert len(CAT) == 53
    assert len(CAT.by_category("safety")) == 21
    assert len(CAT.by_category("causality")) == 12
    assert len(CAT.by_category("operator")) == 14
    assert len(CAT.by_category("liveness")) == 6


def test_ordinals_are_one_to_fifty_three():
    assert sorted(r.ordinal for r in CAT.values()) == list(range(1, 54))


def test_every_entry_maps_to_an_executable_check():
    for req in CAT.values():
        if req.check_kind == "pattern-monitor":
            automaton = req.compile(FULL, ALPH)
            assert automaton.bindings, req.rid
        elif req.check_kind == "obligation-monitor":
            assert req.obligation is not None and req.obligation.rules, req.rid
        elif req.check_kind == "graph-liveness":
            specs = req.liveness(FULL)
            assert specs, req.rid
        else:
            raise AssertionError("unknown check kind for %s" % req.rid)


def test_emergency_stop_of_a_gate_pattern_shape():
    # trigger: any command sent to that gate actuator; blockers: stop command
    # for the pair or emergency activation; forbidden: the emergency stop
    req = CAT["causreq11"]
    assert req.title == "Emergency stop of a gate"
    automaton = req.compile(FULL, ALPH)
    binding = next(b for b in automaton.bindings
                   if b.describe() == "l=north,o=east,s=upstream")
    all_cmds = {ALPH.encode(parse_action(
        "GateActuator(north,upstream,east,%s)" % c.value)) for c in ActuatorCommand}
    assert binding.a_ids == frozenset(all_cmds)
    assert binding.b_ids == {
        ALPH.encode(parse_action("GateCommand(north,upstream,command_stop)")),
        ALPH.encode(parse_action("EmergencyLockCommand(north,activate)")),
    }
    assert binding.c_ids == {
        ALPH.encode(parse_action("GateActuator(north,upstream,east,do_emergencyStop)")),
    }
    assert binding.initial


def test_livereq1_is_graph_liveness():
    req = CAT["livereq1"]
    assert req.check_kind == "graph-liveness"
    assert req.title == "The barrier can always be closed"
    spec = req.liveness(FULL)[0]
    goal_ids = set()
    for pred in spec.goal:
        goal_ids |= pred.action_ids(ALPH, {})
    assert goal_ids == {ALPH.encode(parse_action("BarrierActuator(do_close)"))}


def test_titles_are_stable_strings():
    expected = {
        "safreq1": "Opposing paddles cannot be both open simultaneously",
        "safreq5": "Gates can only open if the waterlevel is equal",
        "safreq10": "Gates and paddles cannot move in emergency mode",
        "safreq40": "The barrier cannot move in emergency mode",
        "commandreq3": "Stop command for the barrier",
        "commandreq12": "Emergency command for a lock",
        "livereq3": "Ships can pass",
    }
    for rid, title in expected.items():
        assert CAT[rid].title == title


def test_selection_by_alias_and_id():
    assert [r.rid for r in CAT.select(["all-safety"])] == \
        [r.rid for r in CAT.by_category("safety")]
    assert len(CAT.select(["all-safety", "all-causality"])) == 33
    assert [r.rid for r in CAT.select(["safreq5", "safreq5"])] == ["safreq5"]
    import pytest
    with pytest.raises(KeyError):
        CAT.select(["nosuchreq"])


def test_no_barrier_config_drops_barrier_bindings():
    mini = PlantConfig.mini()
    alph = Alphabet(mini)
    assert not CAT["safreq40"].compile(mini, alph).bindings
    assert CAT["livereq1"].liveness(mini) == []
    assert CAT["safreq5"].compile(mini, alph).bindings
