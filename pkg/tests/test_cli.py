import io
import contextlib

import pytest

from lockplex.cli import main


def run(argv):
    out = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def test_explore_bounded_stats_line():
    code, out, _ = run(["explore", "--config", "mini", "--mode", "bounded",
                        "--depth", "2"])
    assert code == 0
    assert "states=" in out and "edges=" in out and "wall_time=" in out
    assert "state_bound=131072" in out


def test_explore_exhaustive_full_hits_ceiling():
    code, out, err = run(["explore", "--config", "full"])
    assert code == 4
    assert "ceiling" in err


def test_check_mini_safety_all_ok():
    code, out, _ = run(["check", "--config", "mini", "--req", "all-safety"])
    assert code == 0
    lines = [l for l in out.splitlines() if l and not l.startswith("#")]
    assert len(lines) == 21
    assert all(l.endswith(" ok") for l in lines)


def test_check_detects_mutation_and_writes_counterexample(tmp_path):
    out_dir = str(tmp_path / "cex")
    code, out, _ = run(["check", "--config", "mini", "--req", "safreq5",
                        "--mutate", "drop_water_guard", "--out", out_dir])
    assert code == 1
    assert "safreq5 violated" in out
    cex = tmp_path / "cex" / "safreq5.trace"
    assert cex.exists()
    code2, out2, _ = run(["trace", "--trace", str(cex)])
    assert code2 == 0 and "do_open" in out2


def test_monitor_empty_trace_all_ok(tmp_path):
    trace = tmp_path / "empty.trace"
    trace.write_text("")
    code, out, _ = run(["monitor", "--config", "full", "--trace", str(trace)])
    assert code == 0
    lines = [l for l in out.splitlines() if l]
    assert len(lines) == 47  # safety + causality + operator by default
    assert all(" ok " in l for l in lines)


def test_monitor_missing_file():
    code, _, err = run(["monitor", "--config", "full", "--trace", "/nonexistent.trace"])
    assert code == 3


def test_unknown_mutation_is_usage_error():
    code, _, err = run(["check", "--config", "mini", "--mutate", "no_such"])
    assert code == 2


def test_unknown_requirement_rejected():
    with pytest.raises(KeyError):
        run(["check", "--config", "mini", "--req", "bogus"])


def test_simulate_seeded_regression(tmp_path):
    trace_a = tmp_path / "a.trace"
    trace_b = tmp_path / "b.trace"
    argv = ["simulate", "--config", "full", "--steps", "300", "--seed", "7",
            "--req", "all-safety,all-causality"]
    code, out_a, _ = run(argv + ["--trace-out", str(trace_a)])
    assert code == 0
    lines = [l for l in out_a.splitlines() if l and not l.startswith("#")]
    assert len(lines) == 33 and all(" ok " in l for l in lines)
    code, out_b, _ = run(argv + ["--trace-out", str(trace_b)])
    assert code == 0
    assert trace_a.read_text() == trace_b.read_text()
    assert out_a == out_b


def test_simulate_scenario_file(tmp_path):
    scen = tmp_path / "s.scenario"
    scen.write_text("0 seed 3\n"
                    "1 command WaterSensor(north,upstream,equal)\n"
                    "2 command GateCommand(north,upstream,command_open)\n")
    trace = tmp_path / "out.trace"
    code, out, _ = run(["simulate", "--config", "full", "--scenario", str(scen),
                        "--steps", "30", "--trace-out", str(trace)])
    assert code == 0
    text = trace.read_text()
    assert "GateActuator(north,upstream,east,do_open)" in text
    assert "GateSensor(north,upstream,east,sense_open)" in text  # plant reports


def test_yaml_config(tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("locks: [north]\norientations: [east]\nbarrier: true\n"
                   "ceilings: {stable_states: 4194304}\n")
    code, out, _ = run(["explore", "--config", str(cfg), "--mode", "bounded",
                        "--depth", "1"])
    assert code == 0
    assert "state_bound=4194304" in out


def test_invalid_yaml_config(tmp_path):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("locks: [atlantis]\n")
    code, _, err = run(["explore", "--config", str(cfg)])
    assert code == 2
