"""Explicit-state exploration and graph-based requirement checking.

Exploration is a vectorized breadth-first sweep over packed states with a
sorted master table for deduplication; edge arrays keep every transition,
self-loops included, so stable states have exactly one outgoing edge per
input-alphabet member.  Checkers run on the frozen graph:

* safety/causality: reachability of (state, armed) product pairs for all
  monitor bindings at once, bit-packed into words;
* operator obligations: re-simulation of every triggered burst tree from
  every enabled stable state;
* liveness: least fixed point of an alternating reachability game where
  inline reads are universal unless the game's LivenessSpec designates an
  essential response.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .catalog import LivenessSpec, Requirement
from .controller import Mutation
from .domain import PlantConfig
from .engine import Engine, TAG_AWAITING, TAG_EMITTING, TAG_STABLE
from .monitor import BindingMonitor, MonitorAutomaton
from .traces import TraceRecord

DEFAULT_STABLE_CEILING = 4_194_304
_CHUNK = 1 << 16


class CheckerError(RuntimeError):
    pass


class CeilingExceeded(CheckerError):
    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats or {}


class MemoryBudgetExceeded(CheckerError):
    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats or {}


def state_bound(config: PlantConfig) -> int:
    """Exact product of the administration parameter domains."""
    n_dev = len(config.devices())
    n_pairs = len(config.pairs())
    bound = (4 ** n_dev) * (4 ** n_dev)               # gates, paddles
    bound *= 4 ** n_pairs                             # entering set-points
    bound *= 2 ** n_pairs                             # leaving set-points
    bound *= 2 ** n_pairs                             # water flags
    bound *= 2 ** len(config.locks)                   # locks in emergency
    if config.include_barrier:
        bound *= 4 * 2 * 2 ** len(config.sides)       # status, flag, lights
    return bound


@dataclass
class StateGraph:
    config: PlantConfig
    engine: Engine
    packed: np.ndarray          # uint64, discovery order
    tags: np.ndarray            # uint8
    depth: np.ndarray           # int32
    parent_src: np.ndarray      # int32, -1 at the root
    parent_act: np.ndarray      # int32
    edge_src: np.ndarray        # int32
    edge_act: np.ndarray        # int32
    edge_dst: np.ndarray        # int32
    exhaustive: bool
    mode: str
    wall_time: float

    def __post_init__(self):
        self._csr = None

    @property
    def n_states(self) -> int:
        return len(self.packed)

    @property
    def n_edges(self) -> int:
        return len(self.edge_src)

    def stats(self) -> dict:
        counts = {int(t): int((self.tags == t).sum()) for t in (0, 1, 2)}
        return {
            "mode": self.mode,
            "states": self.n_states,
            "stable_states": counts[TAG_STABLE],
            "awaiting_states": counts[TAG_AWAITING],
            "emitting_states": counts[TAG_EMITTING],
            "edges": self.n_edges,
            "depth": int(self.depth.max()) if self.n_states else 0,
            "wall_time": round(self.wall_time, 3),
        }

    def csr(self):
        """Edges grouped by source: (order, offsets)."""
        if self._csr is None:
            order = np.argsort(self.edge_src, kind="stable")
            offsets = np.searchsorted(self.edge_src[order],
                                      np.arange(self.n_states + 1))
            self._csr = (order, offsets)
        return self._csr

    def path_to(self, idx: int) -> list[tuple[int, int]]:
        """(state index, action id) steps from the root to ``idx``."""
        steps = []
        while self.parent_src[idx] >= 0:
            steps.append((int(self.parent_src[idx]), int(self.parent_act[idx])))
            idx = int(self.parent_src[idx])
        steps.reverse()
        return steps

    def trace_records(self, steps) -> list[TraceRecord]:
        recs = []
        kind_by_tag = {TAG_STABLE: "input", TAG_AWAITING: "read", TAG_EMITTING: "output"}
        for seq, (src, act) in enumerate(steps):
            recs.append(TraceRecord(seq, kind_by_tag[int(self.tags[src])],
                                    self.engine.alphabet.decode(act)))
        return recs


# ---------------------------------------------------------------------------
# Exploration
# ---------------------------------------------------------------------------

def _expand_chunk(engine: Engine, states: np.ndarray, base: np.ndarray):
    """Successors of one frontier chunk: (src, act, dst-packed) arrays."""
    stable_m, await_m, emit_m = engine.split_by_tag(states)
    srcs, acts, dsts = [], [], []
    sub = states[stable_m]
    idx = base[stable_m]
    if len(sub):
        for aid, succ in engine.expand_stable(sub):
            srcs.append(idx)
            acts.append(np.full(len(sub), aid, dtype=np.int32))
            dsts.append(succ)
    sub = states[await_m]
    idx = base[await_m]
    if len(sub):
        for sel, aid, succ in engine.expand_awaiting(sub):
            srcs.append(idx[sel])
            acts.append(np.full(len(sel), aid, dtype=np.int32))
            dsts.append(succ)
    sub = states[emit_m]
    idx = base[emit_m]
    if len(sub):
        a, succ = engine.expand_emitting(sub)
        srcs.append(idx)
        acts.append(a.astype(np.int32))
        dsts.append(succ)
    if not srcs:
        return (np.empty(0, np.int32), np.empty(0, np.int32), np.empty(0, np.uint64))
    return (np.concatenate(srcs), np.concatenate(acts), np.concatenate(dsts))


def explore(config: PlantConfig, mode: str = "exhaustive", *, depth: int | None = None,
            steps: int | None = None, seed: int = 0, mutation: Mutation | None = None,
            stable_ceiling: int = DEFAULT_STABLE_CEILING,
            max_states: int = 60_000_000, workers: int = 1,
            engine: Engine | None = None) -> StateGraph:
    """Reachable-state exploration: exhaustive, bounded(depth) or random(steps)."""
    engine = engine or Engine(config, mutation)
    if mode == "random":
        return _explore_random(config, engine, steps or 0, seed)
    if mode == "exhaustive":
        bound = state_bound(config)
        if bound > stable_ceiling:
            raise CeilingExceeded(
                "stable-state bound %d exceeds ceiling %d" % (bound, stable_ceiling),
                {"state_bound": bound, "ceiling": stable_ceiling})
        max_depth = None
    elif mode == "bounded":
        if depth is None:
            raise CheckerError("bounded exploration requires a depth")
        max_depth = depth
    else:
        raise CheckerError("unknown exploration mode %r" % mode)
    if not engine.fits_u64:
        return _explore_scalar(config, engine, mode, max_depth, max_states)

    t0 = time.time()
    init = np.array([engine.initial_packed], dtype=np.uint64)
    packed = init.copy()
    tags = np.array([engine.tag_of(int(init[0]))], dtype=np.uint8)
    depth_arr = np.zeros(1, dtype=np.int32)
    parent_src = np.full(1, -1, dtype=np.int32)
    parent_act = np.full(1, -1, dtype=np.int32)
    sorted_vals = init.copy()
    sorted_idx = np.zeros(1, dtype=np.int64)
    edges_src, edges_act, edges_dst = [], [], []
    frontier = np.array([0], dtype=np.int64)
    level = 0
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while len(frontier) and (max_depth is None or level < max_depth):
            fstates = packed[frontier]
            chunks = [(fstates[i:i + _CHUNK], frontier[i:i + _CHUNK])
                      for i in range(0, len(fstates), _CHUNK)]
            if pool is not None:
                results = list(pool.map(lambda c: _expand_chunk(engine, *c), chunks))
            else:
                results = [_expand_chunk(engine, *c) for c in chunks]
            src = np.concatenate([r[0] for r in results])
            act = np.concatenate([r[1] for r in results])
            dst_packed = np.concatenate([r[2] for r in results])

            pos = np.searchsorted(sorted_vals, dst_packed)
            pos_c = np.minimum(pos, len(sorted_vals) - 1)
            known = sorted_vals[pos_c] == dst_packed
            new_vals, first_occurrence = np.unique(dst_packed[~known],
                                                   return_index=True)
            n_old = len(packed)
            if n_old + len(new_vals) > max_states:
                raise MemoryBudgetExceeded(
                    "state budget %d exceeded at depth %d" % (max_states, level),
                    {"states": n_old, "edges": sum(len(e) for e in edges_src),
                     "depth": level})
            if len(new_vals):
                unknown_pos = np.nonzero(~known)[0]
                first_edge = unknown_pos[first_occurrence]
                packed = np.concatenate([packed, new_vals])
                tags = np.concatenate([
                    tags, ((new_vals >> np.uint64(engine.tag_off)) & np.uint64(3)
                           ).astype(np.uint8)])
                depth_arr = np.concatenate([
                    depth_arr, np.full(len(new_vals), level + 1, dtype=np.int32)])
                parent_src = np.concatenate([parent_src, src[first_edge]])
                parent_act = np.concatenate([parent_act, act[first_edge]])
                ins = np.searchsorted(sorted_vals, new_vals)
                sorted_vals = np.insert(sorted_vals, ins, new_vals)
                sorted_idx = np.insert(sorted_idx, ins,
                                       np.arange(n_old, n_old + len(new_vals)))
            dst = sorted_idx[np.searchsorted(sorted_vals, dst_packed)]
            edges_src.append(src.astype(np.int32))
            edges_act.append(act)
            edges_dst.append(dst.astype(np.int32))
            frontier = np.arange(n_old, len(packed), dtype=np.int64)
            level += 1
    finally:
        if pool is not None:
            pool.shutdown()
    graph = StateGraph(
        config, engine, packed, tags, depth_arr, parent_src, parent_act,
        np.concatenate(edges_src) if edges_src else np.empty(0, np.int32),
        np.concatenate(edges_act) if edges_act else np.empty(0, np.int32),
        np.concatenate(edges_dst) if edges_dst else np.empty(0, np.int32),
        exhaustive=(mode == "exhaustive"), mode=mode, wall_time=time.time() - t0)
    return graph


def _explore_scalar(config, engine, mode, max_depth, max_states):
    """Dict-based BFS for layouts wider than 64 bits (bounded mode only)."""
    t0 = time.time()
    index = {engine.initial_packed: 0}
    packed = [engine.initial_packed]
    tags = [engine.tag_of(engine.initial_packed)]
    depth = [0]
    parents = [(-1, -1)]
    e_src, e_act, e_dst = [], [], []
    frontier = [0]
    level = 0
    while frontier and (max_depth is None or level < max_depth):
        new_frontier = []
        for si in frontier:
            p = packed[si]
            for aid in engine.enabled_ids(p):
                q = engine.step_packed(p, aid)
                di = index.get(q)
                if di is None:
                    di = len(packed)
                    if di >= max_states:
                        raise MemoryBudgetExceeded(
                            "state budget %d exceeded" % max_states,
                            {"states": di, "depth": level})
                    index[q] = di
                    packed.append(q)
                    tags.append(engine.tag_of(q))
                    depth.append(level + 1)
                    parents.append((si, aid))
                    new_frontier.append(di)
                e_src.append(si)
                e_act.append(aid)
                e_dst.append(di)
        frontier = new_frontier
        level += 1
    parent_src = np.array([p for p, _ in parents], dtype=np.int32)
    parent_act = np.array([a for _, a in parents], dtype=np.int32)
    return StateGraph(
        config, engine, np.array(packed, dtype=object), np.array(tags, np.uint8),
        np.array(depth, np.int32), parent_src, parent_act,
        np.array(e_src, np.int32), np.array(e_act, np.int32),
        np.array(e_dst, np.int32),
        exhaustive=(mode == "exhaustive"), mode=mode, wall_time=time.time() - t0)


def _explore_random(config, engine, steps, seed):
    t0 = time.time()
    index = {engine.initial_packed: 0}
    packed = [engine.initial_packed]
    tags = [engine.tag_of(engine.initial_packed)]
    depth = [0]
    parents = [(-1, -1)]
    e_set = set()
    e_src, e_act, e_dst = [], [], []
    import random as _random
    rng = _random.Random(seed)
    p = engine.initial_packed
    si = 0
    for n in range(steps):
        ids = engine.enabled_ids(p)
        aid = ids[rng.randrange(len(ids))]
        q = engine.step_packed(p, aid)
        di = index.get(q)
        if di is None:
            di = len(packed)
            index[q] = di
            packed.append(q)
            tags.append(engine.tag_of(q))
            depth.append(n + 1)
            parents.append((si, aid))
        if (si, aid) not in e_set:
            e_set.add((si, aid))
            e_src.append(si)
            e_act.append(aid)
            e_dst.append(di)
        p, si = q, di
    dtype = np.uint64 if engine.fits_u64 else object
    return StateGraph(
        config, engine, np.array(packed, dtype=dtype), np.array(tags, np.uint8),
        np.array(depth, np.int32),
        np.array([x for x, _ in parents], np.int32),
        np.array([a for _, a in parents], np.int32),
        np.array(e_src, np.int32), np.array(e_act, np.int32),
        np.array(e_dst, np.int32), exhaustive=False, mode="random",
        wall_time=time.time() - t0)


# ---------------------------------------------------------------------------
# Safety / causality product checking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProductVerdict:
    requirement_id: str
    ok: bool
    binding: str = ""
    counterexample: tuple = ()      # (state idx, action id) steps, shortest

    def line(self) -> str:
        if self.ok:
            return "%s ok" % self.requirement_id
        return "%s violated [%s] (counterexample %d steps)" % (
            self.requirement_id, self.binding, len(self.counterexample))


def check_safety_product(graph: StateGraph, requirements, alphabet=None,
                         find_counterexamples: bool = True) -> list[ProductVerdict]:
    """Product of the graph with every binding monitor of each requirement."""
    if not graph.exhaustive:
        raise CheckerError("safety product checking requires an exhaustive graph")
    alphabet = alphabet or graph.engine.alphabet
    autos: list[MonitorAutomaton] = [
        req.compile(graph.config, alphabet) for req in requirements]
    bindings: list[tuple[int, BindingMonitor]] = []
    for qi, auto in enumerate(autos):
        for b in auto.bindings:
            bindings.append((qi, b))
    nb = len(bindings)
    words = (nb + 63) // 64 or 1
    n_actions = len(alphabet)
    # per-action transition masks, one bit per binding
    arm = np.zeros((n_actions, words), dtype=np.uint64)
    disarm = np.zeros((n_actions, words), dtype=np.uint64)
    forbid = np.zeros((n_actions, words), dtype=np.uint64)
    init_mask = np.zeros(words, dtype=np.uint64)
    for bi, (_, b) in enumerate(bindings):
        w, bit = divmod(bi, 64)
        for aid in b.a_ids:
            arm[aid, w] |= np.uint64(1 << bit)
        for aid in b.b_ids:
            disarm[aid, w] |= np.uint64(1 << bit)
        for aid in b.c_ids:
            forbid[aid, w] |= np.uint64(1 << bit)
        if b.initial:
            init_mask[w] |= np.uint64(1 << bit)
    disarm &= ~arm      # arming wins when an action matches both

    n = graph.n_states
    reach_a = np.zeros((n, words), dtype=np.uint64)
    reach_d = np.zeros((n, words), dtype=np.uint64)
    reach_a[0] = init_mask
    reach_d[0] = ~init_mask
    keep = ~(arm | disarm)
    # edges grouped by destination so each sweep is a segmented reduction;
    # only edges whose source changed since the last sweep are reprocessed
    dorder = np.argsort(graph.edge_dst, kind="stable")
    dsrc = graph.edge_src[dorder]
    dact = graph.edge_act[dorder]
    ddst = graph.edge_dst[dorder]
    changed_state = np.zeros(n, dtype=bool)
    changed_state[0] = True
    while changed_state.any():
        sel = np.nonzero(changed_state[dsrc])[0]
        changed_state[:] = False
        s, a, d = dsrc[sel], dact[sel], ddst[sel]
        ra, rd = reach_a[s], reach_d[s]
        new_a = (ra & (arm[a] | keep[a])) | (rd & arm[a])
        new_d = (ra & disarm[a]) | (rd & (disarm[a] | keep[a]))
        uniq_dst, seg_starts = np.unique(d, return_index=True)
        red_a = np.bitwise_or.reduceat(new_a, seg_starts, axis=0)
        red_d = np.bitwise_or.reduceat(new_d, seg_starts, axis=0)
        merged_a = reach_a[uniq_dst] | red_a
        merged_d = reach_d[uniq_dst] | red_d
        delta = ((merged_a != reach_a[uniq_dst]) | (merged_d != reach_d[uniq_dst])).any(axis=1)
        reach_a[uniq_dst] = merged_a
        reach_d[uniq_dst] = merged_d
        changed_state[uniq_dst[delta]] = True
    # violations: an armed-reachable source with a forbidden edge
    viol_bits = np.zeros(words, dtype=np.uint64)
    src, act = graph.edge_src, graph.edge_act
    for lo in range(0, len(src), 4_000_000):
        hi = min(lo + 4_000_000, len(src))
        hit = reach_a[src[lo:hi]] & forbid[act[lo:hi]]
        if len(hit):
            viol_bits |= np.bitwise_or.reduce(hit, axis=0)

    verdicts = []
    for qi, (req, auto) in enumerate(zip(requirements, autos)):
        bad = None
        for bi, (q2, b) in enumerate(bindings):
            if q2 != qi:
                continue
            w, bit = divmod(bi, 64)
            if viol_bits[w] & np.uint64(1 << bit):
                bad = b
                break
        if bad is None:
            verdicts.append(ProductVerdict(req.rid, True))
        else:
            cex = _shortest_violation(graph, bad, alphabet) if find_counterexamples else ()
            verdicts.append(ProductVerdict(req.rid, False, bad.describe(), tuple(cex)))
    return verdicts


def _shortest_violation(graph: StateGraph, b: BindingMonitor, alphabet):
    """BFS over the (state, armed) product for one binding monitor."""
    order, offsets = graph.csr()
    a_ids, b_ids, c_ids = b.a_ids, b.b_ids, b.c_ids
    start = (0, b.initial)
    parents = {start: None}
    frontier = [start]
    while frontier:
        nxt = []
        for node in frontier:
            s, armed = node
            for ei in order[offsets[s]:offsets[s + 1]]:
                aid = int(graph.edge_act[ei])
                if armed and aid in c_ids:
                    steps = []
                    cur = node
                    while parents[cur] is not None:
                        prev, edge = parents[cur]
                        steps.append(edge)
                        cur = prev
                    steps.reverse()
                    steps.append((s, aid))
                    return steps
                armed2 = True if aid in a_ids else (False if aid in b_ids else armed)
                node2 = (int(graph.edge_dst[ei]), armed2)
                if node2 not in parents:
                    parents[node2] = (node, (s, aid))
                    nxt.append(node2)
        frontier = nxt
    return []


# ---------------------------------------------------------------------------
# Operator obligations on the graph (burst inevitability)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InevitabilityVerdict:
    requirement_id: str
    ok: bool
    detail: str = ""
    witness: tuple = ()             # (stable state idx, trigger aid, response aids)

    def line(self) -> str:
        return "%s %s%s" % (self.requirement_id, "ok" if self.ok else "violated",
                            "" if self.ok else " " + self.detail)


def check_inevitability(graph: StateGraph, requirement: Requirement,
                        alphabet=None) -> InevitabilityVerdict:
    """Every triggered, enabled burst discharges its obligations on all paths."""
    if not graph.exhaustive:
        raise CheckerError("inevitability checking requires an exhaustive graph")
    engine = graph.engine
    alphabet = alphabet or engine.alphabet
    spec = requirement.obligation
    stable_idx = np.nonzero(graph.tags == TAG_STABLE)[0]
    stable_states = graph.packed[stable_idx]
    for rule in spec.rules:
        for binding in rule.bindings(graph.config):
            trigger_ids = sorted(rule.trigger.action_ids(alphabet, binding))
            if not trigger_ids:
                continue
            enab = None
            for cond in rule.enabling:
                cur = cond.eval_packed(engine, stable_states, binding)
                enab = cur if enab is None else (enab & cur)
            if enab is None:
                enab = np.ones(len(stable_states), dtype=bool)
            sources = stable_states[enab]
            if not len(sources):
                continue
            obligations = rule.obligations(binding, graph.config)
            obl_ids = [p.action_ids(alphabet, binding) for p in obligations]
            full = (1 << len(obl_ids)) - 1
            obl_mask = np.zeros(len(alphabet), dtype=np.int64)
            for i, ids in enumerate(obl_ids):
                for aid in ids:
                    obl_mask[aid] |= 1 << i
            sup_ids = set()
            for p in rule.suppressions:
                sup_ids |= p.action_ids(alphabet, binding)
            sup_arr = np.zeros(len(alphabet), dtype=bool)
            for aid in sup_ids:
                sup_arr[aid] = True
            for taid in trigger_ids:
                first = engine.kernels_vector[taid](sources)
                bad = _burst_tree_check(engine, sources, first, obl_mask, full,
                                        sup_arr, [taid])
                if bad is not None:
                    state, path = bad
                    return InevitabilityVerdict(
                        requirement.rid, False,
                        "trigger %s from a reachable stable state leaves an "
                        "obligation undischarged" % alphabet.decode(taid).text(),
                        witness=(int(state), taid, tuple(path)))
    return InevitabilityVerdict(requirement.rid, True)


def _burst_tree_check(engine, origins, states, obl_mask, full, sup_arr, path):
    """Walk burst trees; returns (origin state, action path) on failure."""
    # worklist of (origin, state, discharged-bits, suppressed, path)
    work = [(origins, states, np.full(len(states), obl_mask[path[-1]], np.int64),
             np.zeros(len(states), dtype=bool), list(path))]
    while work:
        origins, states, disch, supp, path = work.pop()
        stable_m, await_m, emit_m = engine.split_by_tag(states)
        if stable_m.any():
            ok = supp[stable_m] | (disch[stable_m] == full)
            if not ok.all():
                k = int(np.nonzero(~ok)[0][0])
                return int(origins[stable_m][k]), path
        if await_m.any():
            sub, so, sd, ss = (states[await_m], origins[await_m],
                               disch[await_m], supp[await_m])
            for sel, aid, succ in engine.expand_awaiting(sub):
                nd = sd[sel] | obl_mask[aid]
                nsup = ss[sel] | sup_arr[aid]
                work.append((so[sel], succ, nd, nsup, path + [aid]))
        if emit_m.any():
            sub, so, sd, ss = (states[emit_m], origins[emit_m],
                               disch[emit_m], supp[emit_m])
            acts, succ = engine.expand_emitting(sub)
            nd = sd | obl_mask[acts]
            # outputs can differ per element; split by action id for the path log
            for aid in np.unique(acts):
                m = acts == aid
                work.append((so[m], succ[m], nd[m], ss[m], path + [int(aid)]))
    return None


# ---------------------------------------------------------------------------
# Liveness (alternating reachability)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LivenessVerdict:
    requirement_id: str
    ok: bool
    spec_name: str = ""
    winning: int = 0
    losing: int = 0
    losing_sample: tuple = ()

    def line(self) -> str:
        if self.ok:
            return "%s ok" % self.requirement_id
        return "%s violated [%s] %d losing states" % (
            self.requirement_id, self.spec_name, self.losing)


def _designated_table(engine: Engine, spec: LivenessSpec, alphabet):
    """Per (await ctx, pos): designated response id, -1 universal."""
    table = {}
    for ci, ctx in enumerate(engine.await_ctxs):
        for pos, slot in enumerate(ctx.slots):
            probe = slot.with_status(list(slot.status_type)[0])
            chosen = -1
            for pred, designated in spec.essential:
                if pred.kind is not probe.kind:
                    continue
                if pred.matches(probe, {}) or any(
                        pred.matches(slot.with_status(v), {}) for v in slot.status_type):
                    if not isinstance(designated, slot.status_type):
                        raise CheckerError(
                            "essential read class for %s designates an ill-typed "
                            "status %r" % (spec.name, designated))
                    chosen = alphabet.encode(slot.with_status(designated))
                    break
            table[(ci, pos)] = chosen
    return table


def check_liveness(graph: StateGraph, spec: LivenessSpec,
                   requirement_id: str = "", alphabet=None) -> LivenessVerdict:
    """Least fixed point of the winning region for one reachability game."""
    if not graph.exhaustive:
        raise CheckerError("liveness checking requires an exhaustive graph")
    engine = graph.engine
    alphabet = alphabet or engine.alphabet
    n_actions = len(alphabet)
    allowed = np.zeros(n_actions, dtype=bool)
    for pred in spec.allowed:
        for aid in pred.action_ids(alphabet, {}):
            allowed[aid] = True
    goal = np.zeros(n_actions, dtype=bool)
    for pred in spec.goal:
        for aid in pred.action_ids(alphabet, {}):
            goal[aid] = True
    if not goal.any():
        return LivenessVerdict(requirement_id, False, spec.name, 0, graph.n_states)

    desig = _designated_table(engine, spec, alphabet)
    tags = graph.tags
    n = graph.n_states
    # classify awaiting states and find their designated action, if any
    desig_per_state = np.full(n, -2, dtype=np.int64)     # -2: not awaiting
    await_idx = np.nonzero(tags == TAG_AWAITING)[0]
    if len(await_idx):
        ap = graph.packed[await_idx]
        ctx = ((ap >> np.uint64(engine.ctx_off))
               & np.uint64((1 << (engine.pos_off - engine.ctx_off)) - 1)).astype(np.int64)
        pos = ((ap >> np.uint64(engine.pos_off))
               & np.uint64((1 << (engine.ok_off - engine.pos_off)) - 1)).astype(np.int64)
        lut = np.full((len(engine.await_ctxs), max(len(c.slots) for c in engine.await_ctxs)),
                      -1, dtype=np.int64)
        for (ci, po), val in desig.items():
            lut[ci, po] = val
        desig_per_state[await_idx] = lut[ctx, pos]

    order, offsets = graph.csr()
    esrc = graph.edge_src[order]
    eact = graph.edge_act[order]
    edst = graph.edge_dst[order]
    uniq_src, seg_starts = np.unique(esrc, return_index=True)
    is_goal_e = goal[eact].astype(np.uint8)
    exist_allowed = allowed[eact] | (tags[esrc] == TAG_EMITTING)
    universal_e = desig_per_state[esrc] == -1
    designated_e = (desig_per_state[esrc] >= 0) & (eact == desig_per_state[esrc])
    take_e = (exist_allowed | designated_e).astype(np.uint8)

    # states with a goal edge win outright
    goal_hit = np.zeros(n, dtype=bool)
    goal_hit[uniq_src] = np.maximum.reduceat(is_goal_e, seg_starts) != 0
    is_univ = np.zeros(n, dtype=bool)
    is_univ[esrc[universal_e]] = True

    W = np.zeros(n, dtype=np.uint8)
    changed = True
    while changed:
        wd = W[edst]
        exist_red = np.maximum.reduceat(wd & take_e, seg_starts)
        univ_red = np.minimum.reduceat(np.where(universal_e, wd, 1).astype(np.uint8),
                                       seg_starts)
        per_src = np.where(is_univ[uniq_src], univ_red, exist_red)
        new_W = W.copy()
        new_W[uniq_src] |= per_src
        new_W |= goal_hit
        changed = bool((new_W != W).any())
        W = new_W
    losing = np.nonzero(W == 0)[0]
    return LivenessVerdict(requirement_id, len(losing) == 0, spec.name,
                           int(W.sum()), len(losing),
                           tuple(int(x) for x in losing[:5]))


def check_liveness_requirement(graph: StateGraph, requirement: Requirement,
                               alphabet=None):
    """All game instances of one liveness requirement."""
    specs = requirement.liveness(graph.config)
    verdicts = [check_liveness(graph, s, requirement.rid, alphabet) for s in specs]
    if not verdicts:
        return [LivenessVerdict(requirement.rid, True, "no instances under config")]
    return verdicts


# ---------------------------------------------------------------------------
# Graph-vs-trace spot consistency
# ---------------------------------------------------------------------------

def random_graph_paths(graph: StateGraph, n_paths: int, length: int,
                       seed: int) -> np.ndarray:
    """Action-id matrix of seeded random walks over the frozen edge relation."""
    order, offsets = graph.csr()
    rng = np.random.default_rng(seed)
    cur = np.zeros(n_paths, dtype=np.int64)
    ids = np.empty((n_paths, length), dtype=np.int64)
    for k in range(length):
        deg = offsets[cur + 1] - offsets[cur]
        pick = (rng.random(n_paths) * deg).astype(np.int64)
        edge = order[offsets[cur] + pick]
        ids[:, k] = graph.edge_act[edge]
        cur = graph.edge_dst[edge]
    return ids


def spot_check_paths(graph: StateGraph, requirements, n_paths: int = 10_000,
                     length: int = 60, seed: int = 0, alphabet=None) -> dict:
    """Replay many random graph paths through the trace monitors.

    Returns {requirement id: number of violating paths}; a requirement the
    product check proved must come back with zero.  All paths are advanced
    in lock-step, one armed bit per (binding, path).
    """
    alphabet = alphabet or graph.engine.alphabet
    ids = random_graph_paths(graph, n_paths, length, seed)
    out = {}
    n_actions = len(alphabet)
    for req in requirements:
        automaton = req.compile(graph.config, alphabet)
        violated = np.zeros(n_paths, dtype=bool)
        for b in automaton.bindings:
            isa = np.zeros(n_actions, dtype=bool)
            isb = np.zeros(n_actions, dtype=bool)
            isc = np.zeros(n_actions, dtype=bool)
            for aid in b.a_ids:
                isa[aid] = True
            for aid in b.b_ids:
                isb[aid] = True
            for aid in b.c_ids:
                isc[aid] = True
            armed = np.full(n_paths, b.initial, dtype=bool)
            hit = np.zeros(n_paths, dtype=bool)
            for k in range(length):
                col = ids[:, k]
                hit |= armed & isc[col]
                armed = isa[col] | (armed & ~isb[col])
            violated |= hit
        out[req.rid] = int(violated.sum())
    return out
