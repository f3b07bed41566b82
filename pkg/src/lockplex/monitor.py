"""Trace monitors for the behavioural requirements.

Safety and causality requirements compile to two-location automata per
instantiated binding: a *trigger* arms it, a *blocker* disarms it, and a
*forbidden* action while armed is a violation.  When an action matches both
trigger and blocker the trigger wins, matching the window semantics of the
underlying pattern.

Operator requirements are burst obligations: a triggering command whose
enabling condition holds over the reconstructed administration must be
answered, within its own burst, by all obliged outputs unless a suppressing
sensor reading excuses it.  The administration is reconstructed from the
trace alone so the monitors stay independent observers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .domain import (
    Action, ActionKind, Alphabet, DoubleLight, LockId, PlantConfig,
    SingleLight, SingleLightStatus, WaterLevel, opposite,
)
from .controller import Position, _position_report
from .traces import TraceRecord


class PatternError(ValueError):
    """Ill-formed safety pattern (e.g. unbound variable in blocker/forbidden)."""


# ---------------------------------------------------------------------------
# Predicates over actions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Opp:
    """The opposite stream side of a bound variable."""
    name: str


@dataclass(frozen=True)
class OneOf:
    values: tuple


@dataclass(frozen=True)
class ActionPredicate:
    """Kind filter plus per-argument constraints.

    Constraints: None (wildcard), a fixed value, Var/Opp (variable bound per
    monitor binding) or OneOf (finite choice).
    """

    kind: ActionKind
    args: tuple = ()

    def variables(self) -> set[str]:
        out = set()
        for c in self.args:
            if isinstance(c, (Var, Opp)):
                out.add(c.name)
        return out

    def matches(self, action: Action, binding: dict) -> bool:
        if action.kind is not self.kind:
            return False
        for constraint, value in zip(self.args, action.args):
            if constraint is None:
                continue
            if isinstance(constraint, Var):
                if binding[constraint.name] is not value:
                    return False
            elif isinstance(constraint, Opp):
                if opposite(binding[constraint.name]) is not value:
                    return False
            elif isinstance(constraint, OneOf):
                if value not in constraint.values:
                    return False
            elif constraint is not value:
                return False
        return True

    def action_ids(self, alphabet: Alphabet, binding: dict) -> frozenset[int]:
        return frozenset(i for i, a in enumerate(alphabet.actions)
                         if self.matches(a, binding))


def match_any(preds: Sequence[ActionPredicate], action: Action, binding: dict) -> bool:
    return any(p.matches(action, binding) for p in preds)


# ---------------------------------------------------------------------------
# Safety / causality patterns
# ---------------------------------------------------------------------------

_DOMAIN_KINDS = ("lock", "side", "orientation")


@dataclass(frozen=True)
class SafetyPattern:
    """One armed/disarmed window pattern, quantified over plant instances."""

    variables: tuple[tuple[str, str], ...]      # (name, domain kind) pairs
    triggers: tuple[ActionPredicate, ...]       # arm
    blockers: tuple[ActionPredicate, ...]       # disarm
    forbidden: tuple[ActionPredicate, ...]      # violate while armed
    initial_clause: bool

    def __post_init__(self):
        declared = {n for n, _ in self.variables}
        for n, d in self.variables:
            if d not in _DOMAIN_KINDS:
                raise PatternError("unknown variable domain %r" % d)
        trigger_vars = set()
        for p in self.triggers:
            trigger_vars |= p.variables()
        for p in self.blockers + self.forbidden:
            loose = p.variables() - trigger_vars
            if loose:
                raise PatternError("variables %s used in blocker/forbidden but "
                                   "not bound by any trigger" % sorted(loose))
        used = trigger_vars | {v for p in self.blockers + self.forbidden
                               for v in p.variables()}
        if not used <= declared:
            raise PatternError("undeclared variables %s" % sorted(used - declared))

    def bindings(self, config: PlantConfig) -> list[dict]:
        domains = {"lock": config.locks, "side": config.sides,
                   "orientation": config.orientations}
        out = [dict()]
        for name, kind in self.variables:
            out = [dict(b, **{name: v}) for b in out for v in domains[kind]]
        return out


@dataclass(frozen=True)
class BindingMonitor:
    binding: dict
    a_ids: frozenset[int]
    b_ids: frozenset[int]
    c_ids: frozenset[int]
    initial: bool

    def describe(self) -> str:
        return ",".join("%s=%s" % (k, v.value) for k, v in sorted(self.binding.items()))


@dataclass(frozen=True)
class MonitorAutomaton:
    requirement_id: str
    bindings: tuple[BindingMonitor, ...]

    def fresh(self) -> "MonitorState":
        return MonitorState(tuple(b.initial for b in self.bindings), None)


@dataclass(frozen=True)
class MonitorState:
    armed: tuple[bool, ...]
    verdict: tuple[int, int] | None   # (witness seq, binding index), absorbing


def compile_safety(patterns: Sequence[SafetyPattern], config: PlantConfig,
                   alphabet: Alphabet, requirement_id: str = "") -> MonitorAutomaton:
    bindings = []
    for pat in patterns:
        for b in pat.bindings(config):
            a = frozenset().union(*(p.action_ids(alphabet, b) for p in pat.triggers)) \
                if pat.triggers else frozenset()
            bl = frozenset().union(*(p.action_ids(alphabet, b) for p in pat.blockers)) \
                if pat.blockers else frozenset()
            c = frozenset().union(*(p.action_ids(alphabet, b) for p in pat.forbidden)) \
                if pat.forbidden else frozenset()
            if not c:
                continue  # nothing to forbid under this config
            bindings.append(BindingMonitor(b, a, bl, c, pat.initial_clause))
    return MonitorAutomaton(requirement_id, tuple(bindings))


def advance(automaton: MonitorAutomaton, state: MonitorState, action_id: int,
            seq: int) -> MonitorState:
    """One-step semantics; violation check precedes the arm/disarm update."""
    if state.verdict is not None:
        return state
    armed = list(state.armed)
    verdict = None
    for i, b in enumerate(automaton.bindings):
        if armed[i] and action_id in b.c_ids:
            verdict = (seq, i)
            break
        if action_id in b.a_ids:
            armed[i] = True
        elif action_id in b.b_ids:
            armed[i] = False
    if verdict is not None:
        return MonitorState(state.armed, verdict)
    return MonitorState(tuple(armed), None)


def scan_monitor(automaton: MonitorAutomaton, action_ids: np.ndarray):
    """Vectorized whole-trace verdict, equivalent to folding advance.

    Returns (witness seq, binding index) of the earliest violation, or None.
    """
    n = len(action_ids)
    best = None
    for bi, b in enumerate(automaton.bindings):
        isa = np.isin(action_ids, np.fromiter(b.a_ids, dtype=action_ids.dtype,
                                              count=len(b.a_ids))) if b.a_ids else np.zeros(n, bool)
        isb = np.isin(action_ids, np.fromiter(b.b_ids, dtype=action_ids.dtype,
                                              count=len(b.b_ids))) if b.b_ids else np.zeros(n, bool)
        isc = np.isin(action_ids, np.fromiter(b.c_ids, dtype=action_ids.dtype,
                                              count=len(b.c_ids)))
        cpos = np.nonzero(isc)[0]
        if not len(cpos):
            continue
        apos = np.nonzero(isa)[0]
        bpos = np.nonzero(isb)[0]
        a_def = -1 if b.initial else -10   # sentinel ordering: armed iff va >= vb
        if len(apos):
            ia = np.searchsorted(apos, cpos)
            va = np.where(ia > 0, apos[np.maximum(ia - 1, 0)], a_def)
        else:
            va = np.full(len(cpos), a_def)
        if len(bpos):
            ib = np.searchsorted(bpos, cpos)
            vb = np.where(ib > 0, bpos[np.maximum(ib - 1, 0)], -5)
        else:
            vb = np.full(len(cpos), -5)
        hits = cpos[va >= vb]
        if len(hits):
            seq = int(hits[0])
            if best is None or seq < best[0]:
                best = (seq, bi)
    return best


def brute_scan(automaton: MonitorAutomaton, action_ids: Sequence[int]):
    """Independent quadratic oracle over the raw pattern semantics."""
    best = None
    for bi, b in enumerate(automaton.bindings):
        for j, aid in enumerate(action_ids):
            if aid not in b.c_ids:
                continue
            armed = b.initial
            for k in range(j):
                x = action_ids[k]
                if x in b.a_ids:
                    armed = True
                elif x in b.b_ids:
                    armed = False
            if armed:
                if best is None or j < best[0]:
                    best = (j, bi)
                break
    return best


# ---------------------------------------------------------------------------
# Shadow administration (trace-reconstructed controller parameters)
# ---------------------------------------------------------------------------

class Shadow:
    """Re-derives the controller administration from the trace alone.

    Applies the published update rules to inputs and outputs; used by the
    obligation monitors to evaluate enabling conditions at trigger time.
    """

    def __init__(self, config: PlantConfig):
        self.config = config
        self.gate = {d: Position.CLOSED for d in config.devices()}
        self.paddle = {d: Position.CLOSED for d in config.devices()}
        self.entering = {p: DoubleLight.SINGLE_RED for p in config.pairs()}
        self.leaving = {p: SingleLight.RED for p in config.pairs()}
        self.water = {p: False for p in config.pairs()}
        self.lock_em: set[LockId] = set()
        self.barrier = Position.OPENED if config.include_barrier else None
        self.barrier_em = False
        self.blight = {s: SingleLight.RED for s in config.sides} \
            if config.include_barrier else {}

    def update(self, record: TraceRecord) -> None:
        a = record.action
        k, args = a.kind, a.args
        if record.kind == "input":
            if k is ActionKind.EMERGENCY_LOCK_COMMAND:
                l, cmd = args
                if cmd.value == "activate":
                    self.lock_em.add(l)
                else:
                    self.lock_em.discard(l)
            elif k is ActionKind.EMERGENCY_BARRIER_COMMAND:
                self.barrier_em = args[0].value == "activate"
            elif k is ActionKind.WATER_SENSOR:
                l, s, w = args
                self.water[(l, s)] = w is WaterLevel.EQUAL
            elif k is ActionKind.GATE_SENSOR:
                l, s, o, v = args
                self.gate[(l, s, o)] = _position_report(self.gate[(l, s, o)], v)[0]
            elif k is ActionKind.PADDLE_SENSOR:
                l, s, o, v = args
                self.paddle[(l, s, o)] = _position_report(self.paddle[(l, s, o)], v)[0]
            elif k is ActionKind.BARRIER_SENSOR:
                self.barrier = _position_report(self.barrier, args[0])[0]
        elif record.kind == "output":
            if k in (ActionKind.GATE_ACTUATOR, ActionKind.PADDLE_ACTUATOR):
                l, s, o, c = args
                table = self.gate if k is ActionKind.GATE_ACTUATOR else self.paddle
                if c.value == "do_open":
                    table[(l, s, o)] = Position.OPENING
                elif c.value == "do_close":
                    table[(l, s, o)] = Position.CLOSING
            elif k is ActionKind.BARRIER_ACTUATOR:
                c = args[0]
                if c.value == "do_open":
                    self.barrier = Position.OPENING
                elif c.value == "do_close":
                    self.barrier = Position.CLOSING
            elif k is ActionKind.ENTERING_LIGHT_ACTUATOR:
                l, s, o, v = args
                self.entering[(l, s)] = v
            elif k is ActionKind.LEAVING_LIGHT_ACTUATOR:
                l, s, o, v = args
                self.leaving[(l, s)] = v
            elif k is ActionKind.BARRIER_LIGHT_ACTUATOR:
                s, o, v = args
                self.blight[s] = v


# ---------------------------------------------------------------------------
# Enabling conditions (evaluable on a Shadow or on a packed engine state)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cond:
    """One conjunct of an obligation's enabling condition."""

    atom: str
    values: tuple = ()

    def eval_shadow(self, sh: Shadow, b: dict) -> bool:
        cfg = sh.config
        if self.atom == "true":
            return True
        if self.atom == "entering_in":
            return sh.entering[(b["l"], b["s"])] in self.values
        if self.atom == "leaving_is":
            return sh.leaving[(b["l"], b["s"])] is self.values[0]
        if self.atom == "not_lock_emergency":
            return b["l"] not in sh.lock_em
        if self.atom == "not_barrier_emergency":
            return not sh.barrier_em
        if self.atom == "barrier_lights_red":
            return all(v is SingleLight.RED for v in sh.blight.values())
        if self.atom == "barrier_is":
            return sh.barrier is self.values[0]
        if self.atom == "gates_are":
            return all(sh.gate[(b["l"], b["s"], o)] is self.values[0]
                       for o in cfg.orientations)
        if self.atom == "opposite_closed":
            opp = opposite(b["s"])
            return all(sh.gate[(b["l"], opp, o)] is Position.CLOSED
                       and sh.paddle[(b["l"], opp, o)] is Position.CLOSED
                       for o in cfg.orientations)
        if self.atom == "water_equal":
            return sh.water[(b["l"], b["s"])]
        raise AssertionError(self.atom)

    def eval_packed(self, engine, p, b: dict):
        """Same condition over packed states; works elementwise on arrays."""
        from .engine import POS_CODE, DBL_CODE, SGL_CODE
        cfg = engine.config
        if self.atom == "true":
            return p == p if hasattr(p, "shape") else True
        if self.atom == "entering_in":
            f = (p >> engine.entering_off[(b["l"], b["s"])]) & 3
            out = None
            for v in self.values:
                cur = f == DBL_CODE[v]
                out = cur if out is None else (out | cur)
            return out
        if self.atom == "leaving_is":
            return ((p >> engine.leaving_off[(b["l"], b["s"])]) & 1) == SGL_CODE[self.values[0]]
        if self.atom == "not_lock_emergency":
            return (p & (1 << engine.lockem_off[b["l"]])) == 0
        if self.atom == "not_barrier_emergency":
            return (p & (1 << engine.bem_off)) == 0
        if self.atom == "barrier_lights_red":
            mask = sum(1 << off for off in engine.blight_off.values())
            return (p & mask) == 0
        if self.atom == "barrier_is":
            return ((p >> engine.bstatus_off) & 3) == POS_CODE[self.values[0]]
        if self.atom == "gates_are":
            out = None
            for o in cfg.orientations:
                cur = ((p >> engine.gate_off[(b["l"], b["s"], o)]) & 3) == POS_CODE[self.values[0]]
                out = cur if out is None else (out & cur)
            return out
        if self.atom == "opposite_closed":
            opp = opposite(b["s"])
            out = None
            for o in cfg.orientations:
                cur = ((p >> engine.gate_off[(b["l"], opp, o)]) & 3) == 0
                cur = cur & (((p >> engine.paddle_off[(b["l"], opp, o)]) & 3) == 0)
                out = cur if out is None else (out & cur)
            return out
        if self.atom == "water_equal":
            return (p & (1 << engine.water_off[(b["l"], b["s"])])) != 0
        raise AssertionError(self.atom)


# ---------------------------------------------------------------------------
# Obligation monitors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ObligationRule:
    """Trigger command -> obliged outputs within the burst.

    ``obligations(binding, config)`` yields predicates that must each match
    at least one burst record; a record matching any suppression predicate
    cancels the obligation (e.g. a light measured not to show red).
    """

    variables: tuple[tuple[str, str], ...]
    trigger: ActionPredicate
    enabling: tuple[Cond, ...]
    obligations: Callable[[dict, PlantConfig], list[ActionPredicate]]
    suppressions: tuple[ActionPredicate, ...] = ()

    def bindings(self, config: PlantConfig) -> list[dict]:
        domains = {"lock": config.locks, "side": config.sides,
                   "orientation": config.orientations}
        out = [dict()]
        for name, kind in self.variables:
            out = [dict(b, **{name: v}) for b in out for v in domains[kind]]
        return out


@dataclass(frozen=True)
class ObligationSpec:
    requirement_id: str
    rules: tuple[ObligationRule, ...]


@dataclass
class _PendingBurst:
    seq: int
    binding: dict
    missing: list[ActionPredicate]
    suppressions: tuple[ActionPredicate, ...]
    suppressed: bool = False


class ObligationMonitor:
    """Streams trace records; reports the first unmet burst obligation."""

    def __init__(self, spec: ObligationSpec, config: PlantConfig):
        self.spec = spec
        self.config = config
        self.shadow = Shadow(config)
        self.pending: list[_PendingBurst] = []
        self.verdict: tuple[int, str] | None = None   # (trigger seq, detail)

    def _finalize(self) -> None:
        for pb in self.pending:
            if self.verdict is None and pb.missing and not pb.suppressed:
                self.verdict = (pb.seq, "undischarged %s" %
                                ",".join(p.kind.value for p in pb.missing))
        self.pending = []

    def feed(self, record: TraceRecord) -> None:
        if record.kind == "input":
            self._finalize()
            if self.verdict is None:
                for rule in self.spec.rules:
                    for b in rule.bindings(self.config):
                        if not rule.trigger.matches(record.action, b):
                            continue
                        if all(c.eval_shadow(self.shadow, b) for c in rule.enabling):
                            self.pending.append(_PendingBurst(
                                record.seq, b, list(rule.obligations(b, self.config)),
                                rule.suppressions))
            self.shadow.update(record)
            return
        for pb in self.pending:
            pb.missing = [p for p in pb.missing if not p.matches(record.action, pb.binding)]
            if record.kind == "read" and match_any(pb.suppressions, record.action, pb.binding):
                pb.suppressed = True
        self.shadow.update(record)

    def finish(self) -> None:
        self._finalize()


def check_obligations(spec: ObligationSpec, records: Iterable[TraceRecord],
                      config: PlantConfig):
    mon = ObligationMonitor(spec, config)
    for rec in records:
        mon.feed(rec)
        if mon.verdict:
            break
    mon.finish()
    return mon.verdict


def check_obligations_bulk(specs: Sequence[ObligationSpec], records,
                           config: PlantConfig, alphabet: Alphabet):
    """All obligation specs over one long trace with a shared trigger index.

    Returns {requirement id: (trigger seq, detail) or None}.  Equivalent to
    running one ObligationMonitor per spec, but triggers are dispatched by
    dense action id and obligations/suppressions are precompiled id sets.
    """
    trigger_index: dict[int, list] = {}
    for spec in specs:
        for rule in spec.rules:
            for binding in rule.bindings(config):
                entry = (
                    spec.requirement_id, rule, binding,
                    [p.action_ids(alphabet, binding) for p in rule.obligations(binding, config)],
                    frozenset().union(*(p.action_ids(alphabet, binding)
                                        for p in rule.suppressions))
                    if rule.suppressions else frozenset(),
                )
                for aid in rule.trigger.action_ids(alphabet, binding):
                    trigger_index.setdefault(aid, []).append(entry)
    verdicts: dict[str, tuple | None] = {s.requirement_id: None for s in specs}
    shadow = Shadow(config)
    pending: list[list] = []    # [rid, seq, missing id-sets, sup ids, suppressed]

    def finalize():
        for rid, seq, missing, _sup, suppressed in pending:
            if verdicts[rid] is None and missing and not suppressed:
                verdicts[rid] = (seq, "undischarged obligations")
        pending.clear()

    for rec in records:
        aid = alphabet.encode(rec.action)
        if rec.kind == "input":
            finalize()
            for rid, rule, binding, obls, sups in trigger_index.get(aid, ()):
                if verdicts[rid] is not None:
                    continue
                if all(c.eval_shadow(shadow, binding) for c in rule.enabling):
                    pending.append([rid, rec.seq, [set(o) for o in obls],
                                    sups, False])
        else:
            for pb in pending:
                pb[2] = [o for o in pb[2] if aid not in o]
                if rec.kind == "read" and aid in pb[3]:
                    pb[4] = True
        shadow.update(rec)
    finalize()
    return verdicts


# ---------------------------------------------------------------------------
# National-standard emergency light rules (acceptance-level monitors)
# ---------------------------------------------------------------------------

def check_emergency_lights(records: Sequence[TraceRecord], config: PlantConfig):
    """After an emergency activation the burst's light set-points for that
    lock (or the barrier) must be red or red-red.  Returns a violation
    (seq, detail) or None."""
    scope = None           # ("lock", l) | ("barrier",) while inside the burst
    for rec in records:
        a = rec.action
        if rec.kind == "input":
            scope = None
            if a.kind is ActionKind.EMERGENCY_LOCK_COMMAND and a.args[1].value == "activate":
                scope = ("lock", a.args[0])
            elif a.kind is ActionKind.EMERGENCY_BARRIER_COMMAND and a.args[0].value == "activate":
                scope = ("barrier",)
            continue
        if scope is None or rec.kind != "output":
            continue
        if scope[0] == "lock" and a.args and a.args[0] is scope[1]:
            if a.kind is ActionKind.ENTERING_LIGHT_ACTUATOR \
                    and a.args[3] not in (DoubleLight.SINGLE_RED, DoubleLight.REDRED):
                return rec.seq, "entering light %s after lock emergency" % a.args[3].value
            if a.kind is ActionKind.LEAVING_LIGHT_ACTUATOR \
                    and a.args[3] is not SingleLight.RED:
                return rec.seq, "leaving light %s after lock emergency" % a.args[3].value
        if scope[0] == "barrier" and a.kind is ActionKind.BARRIER_LIGHT_ACTUATOR \
                and a.args[2] is not SingleLight.RED:
            return rec.seq, "barrier light %s after barrier emergency" % a.args[2].value
    return None


def check_green_allowed_in_emergency(records: Sequence[TraceRecord],
                                     config: PlantConfig):
    """Lights stay settable to green during emergency mode.

    Wherever a green command arrives for an emergency-mode lock with its
    stored guards satisfied and all inline reads acceptable, the green
    actuators must still be emitted.  Returns (violation, instances): the
    instance count tells the caller whether the property was exercised.
    """
    shadow = Shadow(config)
    pending = None      # (seq, required ids) for the current burst
    instances = 0
    violation = None
    for rec in records:
        a = rec.action
        if rec.kind == "input":
            if pending and pending[1]:
                violation = violation or (pending[0], "green suppressed in emergency")
            pending = None
            if a.kind is ActionKind.ENTERING_LIGHT_COMMAND \
                    and a.args[2] is DoubleLight.SINGLE_GREEN:
                l, s, _ = a.args
                guard = (l in shadow.lock_em
                         and shadow.leaving[(l, s)] is SingleLight.RED
                         and all(shadow.gate[(l, s, o)] is Position.OPENED
                                 for o in config.orientations))
                if guard:
                    instances += 1
                    pending = [rec.seq, {(l, s, o) for o in config.orientations}]
        elif pending is not None:
            if rec.kind == "read" and a.kind is ActionKind.LEAVING_LIGHT_SENSOR \
                    and a.args[3] is not SingleLightStatus.SHOW_RED:
                pending = None      # a bad reading legitimately blocks green
            elif rec.kind == "output" and a.kind is ActionKind.ENTERING_LIGHT_ACTUATOR \
                    and a.args[3] is DoubleLight.SINGLE_GREEN:
                pending[1].discard(a.args[:3])
        shadow.update(rec)
    if pending and pending[1]:
        violation = violation or (pending[0], "green suppressed in emergency")
    return violation, instances


# ---------------------------------------------------------------------------
# Trace report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    requirement_id: str
    ok: bool
    witness_seq: int | None = None
    detail: str = ""

    def line(self) -> str:
        if self.ok:
            return "%s ok - -" % self.requirement_id
        return "%s violated %s %s" % (self.requirement_id, self.witness_seq,
                                      self.detail or "-")


def check_trace(records: list[TraceRecord], requirements, config: PlantConfig,
                alphabet: Alphabet | None = None) -> list[Verdict]:
    """Run pattern and obligation monitors over one complete trace.

    ``requirements`` is an iterable of catalog entries; graph-only entries are
    reported as ok with a note (they are not trace-checkable).
    """
    alphabet = alphabet or Alphabet(config)
    ids = np.fromiter((alphabet.encode(r.action) for r in records),
                      dtype=np.int64, count=len(records))
    out = []
    for req in requirements:
        if req.check_kind == "pattern-monitor":
            automaton = req.compile(config, alphabet)
            hit = scan_monitor(automaton, ids)
            if hit is None:
                out.append(Verdict(req.rid, True))
            else:
                seq, bi = hit
                out.append(Verdict(req.rid, False, seq,
                                   automaton.bindings[bi].describe()))
        elif req.check_kind == "obligation-monitor":
            hit = check_obligations(req.obligation, records, config)
            if hit is None:
                out.append(Verdict(req.rid, True))
            else:
                out.append(Verdict(req.rid, False, hit[0], hit[1]))
        else:
            out.append(Verdict(req.rid, True, None, "graph-only"))
    return out
