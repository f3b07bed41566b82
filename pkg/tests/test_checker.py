import numpy as np
import pytest

from lockplex.catalog import LivenessSpec, catalog
from lockplex.checker import (
    CeilingExceeded, CheckerError, MemoryBudgetExceeded, check_inevitability,
    check_liveness, check_liveness_requirement, check_safety_product, explore,
    state_bound,
)
from lockplex.domain import (
    ActionKind, ActuatorCommand, Alphabet, DomainError, LockId, Orientation,
    PlantConfig, StreamSide,
)
from lockplex.engine import TAG_STABLE
from lockplex.monitor import ActionPredicate, check_trace

CAT = catalog()
MINI = PlantConfig.mini()
FULL = PlantConfig.full()


@pytest.fixture(scope="module")
def mini_graph():
    return explore(MINI, "exhaustive")


# ---------------------------------------------------------------------------
# state_bound
# ---------------------------------------------------------------------------

def test_state_bound_full():
    # 4*2*4 * 4^8 * 4^8 * 4^4 * 2^4 * 2^4 * 4
    assert state_bound(FULL) == 36_028_797_018_963_968
    assert state_bound(FULL) >= 1_600_000_000_000_000  # the full model is larger
    # and it is exactly the packed parameter width
    from lockplex.engine import Engine
    assert state_bound(FULL) == 1 << Engine(FULL).params_bits


def test_state_bound_reduced():
    assert state_bound(PlantConfig.reduced1()) == 4_194_304


def test_state_bound_mini():
    assert state_bound(MINI) == 131_072


def test_single_side_config_rejected():
    with pytest.raises(DomainError):
        PlantConfig(locks=(LockId.NORTH,), stream_sides=(StreamSide.UPSTREAM,),
                    orientations=(Orientation.EAST,), include_barrier=False)


# ---------------------------------------------------------------------------
# exploration
# ---------------------------------------------------------------------------

def test_bounded_zero_is_single_state():
    for config in (MINI, PlantConfig.reduced1(), FULL):
        g = explore(config, "bounded", depth=0)
        assert g.n_states == 1 and g.n_edges == 0


def test_bounded_depths_are_monotone():
    seen = set()
    for d in range(0, 4):
        g = explore(MINI, "bounded", depth=d)
        states = set(int(x) for x in g.packed)
        assert seen <= states
        seen = states


def test_bounded_works_on_full_config_via_scalar_path():
    g = explore(FULL, "bounded", depth=1)
    # one stable root plus one successor per stable input that changes state
    assert g.n_edges == 142
    assert g.depth.max() == 1


def test_exhaustive_full_config_hits_ceiling():
    with pytest.raises(CeilingExceeded) as e:
        explore(FULL, "exhaustive")
    assert e.value.stats["state_bound"] == 36_028_797_018_963_968


def test_memory_budget_reports_partial_stats():
    with pytest.raises(MemoryBudgetExceeded) as e:
        explore(MINI, "exhaustive", max_states=1000)
    assert e.value.stats["states"] <= 1000


def test_explore_is_deterministic_across_runs_and_workers(mini_graph):
    g2 = explore(MINI, "exhaustive")
    g3 = explore(MINI, "exhaustive", workers=3)
    for other in (g2, g3):
        assert np.array_equal(mini_graph.packed, other.packed)
        assert np.array_equal(mini_graph.edge_src, other.edge_src)
        assert np.array_equal(mini_graph.edge_act, other.edge_act)
        assert np.array_equal(mini_graph.edge_dst, other.edge_dst)


def test_mini_reachable_counts_regression(mini_graph):
    # regression values computed by this build's own first exhaustive run
    s = mini_graph.stats()
    assert s["stable_states"] == 12_672
    assert s["states"] == 153_232
    assert s["edges"] == 782_992


def test_stable_out_degree_equals_input_alphabet(mini_graph):
    alph = Alphabet(MINI)
    order, offsets = mini_graph.csr()
    degrees = np.diff(offsets)
    stable = mini_graph.tags == TAG_STABLE
    assert (degrees[stable] == len(alph.stable_input_ids())).all()
    assert (degrees > 0).all()


def test_reachable_below_burst_inflated_bound(mini_graph):
    assert mini_graph.n_states <= state_bound(MINI) * 25


def test_random_exploration_is_seeded_and_deterministic():
    g1 = explore(MINI, "random", steps=5000, seed=9)
    g2 = explore(MINI, "random", steps=5000, seed=9)
    assert np.array_equal(g1.packed, g2.packed)
    assert np.array_equal(g1.edge_src, g2.edge_src)
    g3 = explore(MINI, "random", steps=5000, seed=10)
    assert not np.array_equal(g1.packed, g3.packed)
    assert not g1.exhaustive


# ---------------------------------------------------------------------------
# product checking
# ---------------------------------------------------------------------------

def test_product_requires_exhaustive_graph():
    g = explore(MINI, "bounded", depth=2)
    with pytest.raises(CheckerError):
        check_safety_product(g, [CAT["safreq5"]])


def test_all_patterns_hold_on_mini(mini_graph):
    reqs = [r for r in CAT.values() if r.check_kind == "pattern-monitor"]
    verdicts = check_safety_product(mini_graph, reqs)
    assert all(v.ok for v in verdicts)
    assert len(verdicts) == 33


def test_unsatisfiable_trigger_is_trivially_ok(mini_graph):
    # a monitor whose forbidden action never occurs in the alphabet usage
    verdict = check_safety_product(mini_graph, [CAT["safreq35"]])[0]
    assert verdict.ok  # no barrier in mini: no bindings at all


def test_mutated_gate_close_produces_counterexample_trace(mini_graph):
    from lockplex.mutations import MUTATIONS
    case = MUTATIONS["drop_water_guard"]
    g = explore(MINI, "exhaustive", mutation=case.mutation)
    verdict = check_safety_product(g, [CAT["safreq5"]])[0]
    assert not verdict.ok
    # the shortest counterexample replays as a violating trace
    records = g.trace_records(verdict.counterexample)
    trace_verdicts = check_trace(records, [CAT["safreq5"]], MINI, g.engine.alphabet)
    assert not trace_verdicts[0].ok
    assert records[-1].action.kind is ActionKind.GATE_ACTUATOR
    assert records[-1].action.args[-1] is ActuatorCommand.DO_OPEN


# ---------------------------------------------------------------------------
# inevitability
# ---------------------------------------------------------------------------

def test_all_obligations_hold_on_mini(mini_graph):
    reqs = [r for r in CAT.values() if r.check_kind == "obligation-monitor"]
    verdicts = [check_inevitability(mini_graph, r) for r in reqs]
    assert all(v.ok for v in verdicts)
    assert len(verdicts) == 17


def test_skipped_lights_mutation_fails_gate_stop_obligation():
    from lockplex.mutations import MUTATIONS
    case = MUTATIONS["skip_light_red_on_stop"]
    g = explore(MINI, "exhaustive", mutation=case.mutation)
    assert not check_inevitability(g, CAT["commandreq8"]).ok
    assert check_inevitability(g, CAT["commandreq11"]).ok  # paddles unaffected


# ---------------------------------------------------------------------------
# liveness
# ---------------------------------------------------------------------------

def test_liveness_requirements_hold_on_mini(mini_graph):
    for rid in ("livereq1", "livereq2", "livereq3"):
        verdicts = check_liveness_requirement(mini_graph, CAT[rid])
        assert all(v.ok for v in verdicts), rid


def test_goalless_spec_fails_with_empty_winning_set(mini_graph):
    spec = LivenessSpec("nogoal", (ActionPredicate(ActionKind.SKIP),), (),
                        (ActionPredicate(ActionKind.BARRIER_ACTUATOR,
                                         (ActuatorCommand.DO_OPEN,)),))
    v = check_liveness(mini_graph, spec, "test")
    assert not v.ok and v.winning == 0


def test_ships_can_pass_needs_water_event(mini_graph):
    # an adversarial environment that never reports equal water blocks passage
    base = CAT["livereq3"].liveness(MINI)[0]
    crippled = LivenessSpec(
        base.name + "-no-water",
        tuple(p for p in base.allowed if p.kind is not ActionKind.WATER_SENSOR),
        base.essential, base.goal)
    assert check_liveness(mini_graph, base, "livereq3").ok
    assert not check_liveness(mini_graph, crippled, "livereq3").ok


def test_ships_can_pass_needs_essential_light_reads(mini_graph):
    # with the target's light reads universal the adversary answers fail
    base = CAT["livereq3"].liveness(MINI)[0]
    universal = LivenessSpec(base.name + "-universal-reads", base.allowed, (),
                             base.goal)
    assert not check_liveness(mini_graph, universal, "livereq3").ok


def test_liveness_monotone_in_allowed_set(mini_graph):
    base = CAT["livereq2"].liveness(MINI)[0]
    smaller = LivenessSpec(base.name, base.allowed[:2], base.essential, base.goal)
    v_small = check_liveness(mini_graph, smaller, "livereq2")
    v_base = check_liveness(mini_graph, base, "livereq2")
    assert v_small.winning <= v_base.winning


def test_liveness_requires_exhaustive():
    g = explore(MINI, "bounded", depth=3)
    with pytest.raises(CheckerError):
        check_liveness(g, CAT["livereq2"].liveness(MINI)[0], "livereq2")


# ---------------------------------------------------------------------------
# graph-vs-trace spot consistency
# ---------------------------------------------------------------------------

def test_product_and_trace_semantics_agree_on_random_paths(mini_graph):
    from lockplex.checker import spot_check_paths
    reqs = CAT.select(["all-safety", "all-causality"])
    counts = spot_check_paths(mini_graph, reqs, n_paths=10_000, length=60, seed=5)
    assert all(v == 0 for v in counts.values()), counts
    # and the converse: a graph the product check rejects also violates on paths
    from lockplex.mutations import MUTATIONS
    g = explore(MINI, "exhaustive", mutation=MUTATIONS["drop_water_guard"].mutation)
    assert not check_safety_product(g, [CAT["safreq5"]],
                                    find_counterexamples=False)[0].ok
    assert spot_check_paths(g, [CAT["safreq5"]], n_paths=10_000,
                            length=60, seed=5)["safreq5"] > 0
