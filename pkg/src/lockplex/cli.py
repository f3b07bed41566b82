"""Command-line entry point.

Subcommands: ``explore`` (state-space statistics), ``check`` (exhaustive
verification of selected requirements on a reduced configuration),
``monitor`` (requirement report over a trace file), ``simulate`` (closed-loop
run with fault scenarios), ``serve`` (session service) and ``trace``
(validate/pretty-print trace files).

Exit codes: 0 all requested checks pass; 1 violations found; 2 invalid
invocation or configuration; 3 missing file; 4 exploration ceiling or
memory budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

import yaml

from .catalog import catalog
from .checker import (
    CeilingExceeded, DEFAULT_STABLE_CEILING, MemoryBudgetExceeded,
    check_inevitability, check_liveness_requirement, check_safety_product,
    explore, state_bound,
)
from .domain import (
    BUILTIN_CONFIGS, DomainError, LockId, Orientation, PlantConfig,
)
from .monitor import check_trace
from .mutations import MUTATIONS
from .sim import Scenario, random_commands, simulate
from .traces import load_trace, validate, write_trace

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_MISSING, EXIT_CEILING = 0, 1, 2, 3, 4


def load_config(name_or_path: str) -> tuple[PlantConfig, dict]:
    """A builtin name (full/reduced1/mini) or a YAML document."""
    if name_or_path in BUILTIN_CONFIGS:
        return BUILTIN_CONFIGS[name_or_path](), {}
    try:
        with open(name_or_path, "r", encoding="utf-8") as fp:
            doc = yaml.safe_load(fp) or {}
    except FileNotFoundError:
        raise
    if not isinstance(doc, dict):
        raise DomainError("config document must be a mapping")
    try:
        locks = tuple(LockId(x) for x in doc.get("locks", ["north", "south"]))
        orientations = tuple(Orientation(x)
                             for x in doc.get("orientations", ["east", "west"]))
    except ValueError as exc:
        raise DomainError(str(exc))
    config = PlantConfig(locks=locks, orientations=orientations,
                         include_barrier=bool(doc.get("barrier", True)))
    ceilings = doc.get("ceilings", {}) or {}
    if not isinstance(ceilings, dict):
        raise DomainError("ceilings must be a mapping")
    return config, ceilings


def _mutation(args):
    if getattr(args, "mutate", None):
        if args.mutate not in MUTATIONS:
            raise DomainError("unknown mutation %r; known: %s"
                              % (args.mutate, ", ".join(sorted(MUTATIONS))))
        return MUTATIONS[args.mutate].mutation
    return None


def _select(args, default="all"):
    cat = catalog()
    names = (args.req or default).split(",")
    return cat, cat.select(names)


def cmd_explore(args) -> int:
    config, ceilings = load_config(args.config)
    graph = explore(config, args.mode, depth=args.depth, steps=args.steps,
                    seed=args.seed, mutation=_mutation(args),
                    stable_ceiling=int(ceilings.get("stable_states",
                                                    DEFAULT_STABLE_CEILING)),
                    max_states=int(ceilings.get("max_states", 60_000_000)),
                    workers=args.workers)
    stats = graph.stats()
    stats["state_bound"] = state_bound(config)
    print(" ".join("%s=%s" % (k, v) for k, v in stats.items()))
    return EXIT_OK


def cmd_check(args) -> int:
    config, ceilings = load_config(args.config)
    cat, reqs = _select(args)
    graph = explore(config, "exhaustive", mutation=_mutation(args),
                    stable_ceiling=int(ceilings.get("stable_states",
                                                    DEFAULT_STABLE_CEILING)),
                    max_states=int(ceilings.get("max_states", 60_000_000)),
                    workers=args.workers)
    print("# explored %(states)d states %(edges)d edges in %(wall_time)ss"
          % graph.stats())
    failures = 0
    pattern_reqs = [r for r in reqs if r.check_kind == "pattern-monitor"]
    verdicts = check_safety_product(graph, pattern_reqs) if pattern_reqs else []
    for req, v in zip(pattern_reqs, verdicts):
        print(v.line())
        if not v.ok:
            failures += 1
            if args.out:
                import os
                os.makedirs(args.out, exist_ok=True)
                path = "%s/%s.trace" % (args.out, req.rid)
                with open(path, "w", encoding="utf-8") as fp:
                    write_trace(fp, graph.trace_records(v.counterexample))
                print("#   counterexample written to %s" % path)
    for req in reqs:
        if req.check_kind == "obligation-monitor":
            v = check_inevitability(graph, req)
            print(v.line())
            failures += 0 if v.ok else 1
        elif req.check_kind == "graph-liveness":
            vs = check_liveness_requirement(graph, req)
            ok = all(x.ok for x in vs)
            print("%s %s (%d game instances)"
                  % (req.rid, "ok" if ok else "violated", len(vs)))
            failures += 0 if ok else 1
    print("# %d requirements checked, %d violated" % (len(reqs), failures))
    return EXIT_OK if failures == 0 else EXIT_VIOLATION


def cmd_monitor(args) -> int:
    config, _ = load_config(args.config)
    cat, reqs = _select(args, default="all-safety,all-causality,all-operator")
    records = load_trace(args.trace)
    validate(records)
    verdicts = check_trace(records, reqs, config)
    failures = 0
    for v in verdicts:
        print(v.line())
        failures += 0 if v.ok else 1
    return EXIT_OK if failures == 0 else EXIT_VIOLATION


def cmd_simulate(args) -> int:
    config, _ = load_config(args.config)
    cat, reqs = _select(args, default="all-safety,all-causality,all-operator")
    if args.scenario:
        scenario = Scenario.load(args.scenario)
        if args.seed is not None:
            scenario = Scenario(args.seed, scenario.events)
    else:
        seed = args.seed if args.seed is not None else 0
        scenario = Scenario(seed, tuple(random_commands(
            config, args.steps, args.rate, seed)))
    loop = simulate(config, scenario, args.steps, mutation=_mutation(args))
    if args.trace_out:
        with open(args.trace_out, "w", encoding="utf-8") as fp:
            write_trace(fp, loop.records)
    verdicts = check_trace(loop.records, reqs, config)
    failures = 0
    for v in verdicts:
        print(v.line())
        failures += 0 if v.ok else 1
    print("# ticks=%d actions=%d commands=%d faults=%d violations=%d"
          % (loop.tick_count, loop.seq,
             sum(1 for e in scenario.events if e.kind == "command"),
             len(loop.plant.faults), failures))
    return EXIT_OK if failures == 0 else EXIT_VIOLATION


def cmd_serve(args) -> int:
    from .service import serve
    config, _ = load_config(args.config)
    cat, reqs = _select(args, default="all-safety,all-causality,all-operator")
    reqs = [r for r in reqs if r.check_kind != "graph-liveness"]
    serve(config, args.port, monitor_set=reqs, mutation=_mutation(args),
          record_dir=args.record_dir, host=args.host)
    return EXIT_OK


def cmd_trace(args) -> int:
    records = load_trace(args.trace)
    validate(records)
    counts = {"input": 0, "read": 0, "output": 0}
    for rec in records:
        counts[rec.kind] += 1
        if not args.quiet:
            print("%6d  %-6s  %s" % (rec.seq, rec.kind, rec.action.text()))
    print("# %d records (%d inputs, %d reads, %d outputs)"
          % (len(records), counts["input"], counts["read"], counts["output"]))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lockplex",
        description="Lock-complex controller: exploration, verification, "
                    "simulation and the operator session service.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mutate=True):
        p.add_argument("--config", default="full",
                       help="builtin name (full, reduced1, mini) or YAML path")
        if mutate:
            p.add_argument("--mutate", help="inject a named controller mutation")

    p = sub.add_parser("explore", help="explore the reachable state space")
    common(p)
    p.add_argument("--mode", choices=["exhaustive", "bounded", "random"],
                   default="exhaustive")
    p.add_argument("--depth", type=int, help="layer bound for bounded mode")
    p.add_argument("--steps", type=int, default=10000, help="steps for random mode")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("check", help="exhaustively verify requirements")
    common(p)
    p.add_argument("--req", help="ids and aliases, comma separated "
                                 "(all, all-safety, all-causality, all-operator, "
                                 "all-liveness)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="directory for counterexample traces")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("monitor", help="run requirement monitors over a trace file")
    common(p, mutate=False)
    p.add_argument("--trace", required=True)
    p.add_argument("--req")
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("simulate", help="closed-loop simulation with fault injection")
    common(p)
    p.add_argument("--scenario", help="scenario file to replay")
    p.add_argument("--steps", type=int, default=1000, help="plant ticks to run")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--rate", type=float, default=0.3,
                   help="random operator commands per tick (without --scenario)")
    p.add_argument("--req")
    p.add_argument("--trace-out", help="write the produced trace here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run the session service")
    common(p)
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="0.0.0.0")
    p.add_argument("--req")
    p.add_argument("--record-dir", help="persist per-session traces/scenarios")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("trace", help="validate and pretty-print a trace file")
    p.add_argument("--trace", required=True)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print("missing file: %s" % exc, file=sys.stderr)
        return EXIT_MISSING
    except (CeilingExceeded, MemoryBudgetExceeded) as exc:
        print("aborted: %s" % exc, file=sys.stderr)
        if getattr(exc, "stats", None):
            print("partial statistics: %s" % json.dumps(exc.stats), file=sys.stderr)
        return EXIT_CEILING
    except DomainError as exc:
        print("invalid invocation: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
