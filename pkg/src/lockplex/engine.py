"""Canonical packed encoding of controller states plus compiled transitions.

A stable state is its administration parameters bit-packed into an integer;
awaiting/emitting states add a mode block (tag, handler context, position,
ok flag).  Transition kernels are compiled once per configuration and come in
two flavours sharing one definition: scalar (plain Python ints, any config)
and vectorized (numpy uint64 arrays, configs whose layout fits 64 bits).

Emitting states are canonicalized: two bursts whose remaining output queues
and administrations coincide are the same state, matching value equality of
the reference ControllerState.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .controller import (
    Awaiting, ControllerParams, ControllerState, Emitting, FrozenMap,
    HandlerId, Mutation, Position, ReadSlot, Stable, _read_ok, initial_state,
)
from .domain import (
    Action, ActionKind, ActuatorCommand, Alphabet, ConsoleCommand,
    DomainError, DoubleLight, EmergencyCommand, PlantConfig, SensorPosition,
    SingleLight, StreamSide, WaterLevel, opposite,
)

TAG_STABLE, TAG_AWAITING, TAG_EMITTING = 0, 1, 2

POS_CODE = {Position.CLOSED: 0, Position.OPENING: 1,
            Position.OPENED: 2, Position.CLOSING: 3}
POS_DECODE = {v: k for k, v in POS_CODE.items()}
DBL_CODE = {DoubleLight.SINGLE_RED: 0, DoubleLight.REDRED: 1,
            DoubleLight.REDGREEN: 2, DoubleLight.SINGLE_GREEN: 3}
DBL_DECODE = {v: k for k, v in DBL_CODE.items()}
SGL_CODE = {SingleLight.RED: 0, SingleLight.GREEN: 1}
SGL_DECODE = {v: k for k, v in SGL_CODE.items()}

# stored-position transition tables indexed by POS_CODE
_LUT_OPEN = (3, 2, 2, 3)        # closed->closing, opening/opened->opened, closing->closing
_LUT_OPEN_EMIT = (0, 1, 1, 0)   # endStopOpening when opening/opened
_LUT_CLOSED = (0, 1, 1, 0)      # closed/closing->closed, opening/opened->opening
_LUT_CLOSED_EMIT = (1, 0, 0, 1)
_LUT_VAGUE = (3, 1, 1, 3)       # end-position certainty lost, no emission
_LUT_EMERGENCY_ASPECT = (0, 1, 1, 0)  # sr->sr, rr->rr, rg->rr, sg->sr


@dataclass(frozen=True)
class AwaitCtx:
    handler: HandlerId
    args: tuple
    slots: tuple[ReadSlot, ...]


@dataclass(frozen=True)
class EmitCtx:
    name: str
    args: tuple
    queue_ids: tuple[int, ...]


class _ScalarOps:
    uses_numpy = False

    @staticmethod
    def where(cond, a, b):
        return a if cond else b

    @staticmethod
    def table(values):
        return tuple(values)

    @staticmethod
    def lut(table, idx):
        return table[idx]


class _VectorOps:
    uses_numpy = True

    @staticmethod
    def where(cond, a, b):
        return np.where(cond, a, b)

    @staticmethod
    def table(values):
        return np.asarray(values, dtype=np.uint64)

    @staticmethod
    def lut(table, idx):
        return table[idx.astype(np.intp)]


class Engine:
    """Compiled packed-state transition system for one config (+ mutation)."""

    def __init__(self, config: PlantConfig, mutation: Mutation | None = None,
                 alphabet: Alphabet | None = None):
        self.config = config
        self.mutation = mutation
        self.alphabet = alphabet or Alphabet(config)
        self._build_layout()
        self._build_contexts()
        self._build_mode_fields()
        self._build_canonical_map()
        self._build_await_tables()
        self._build_kernels()
        self.initial_packed = self.pack(initial_state(config))
        self.stable_ids = self.alphabet.stable_input_ids()

    # ------------------------------------------------------------------
    # layout
    # ------------------------------------------------------------------

    def _build_layout(self):
        cfg = self.config
        off = 0
        self.gate_off, self.paddle_off = {}, {}
        for d in cfg.devices():
            self.gate_off[d] = off
            off += 2
        for d in cfg.devices():
            self.paddle_off[d] = off
            off += 2
        self.entering_off, self.leaving_off, self.water_off = {}, {}, {}
        for pr in cfg.pairs():
            self.entering_off[pr] = off
            off += 2
        for pr in cfg.pairs():
            self.leaving_off[pr] = off
            off += 1
        for pr in cfg.pairs():
            self.water_off[pr] = off
            off += 1
        self.lockem_off = {}
        for l in cfg.locks:
            self.lockem_off[l] = off
            off += 1
        if cfg.include_barrier:
            self.bstatus_off = off
            off += 2
            self.bem_off = off
            off += 1
            self.blight_off = {}
            for s in cfg.sides:
                self.blight_off[s] = off
                off += 1
        self.params_bits = off
        self.params_mask = (1 << off) - 1

    # ------------------------------------------------------------------
    # handler contexts
    # ------------------------------------------------------------------

    def _build_contexts(self):
        cfg, enc = self.config, self.alphabet.encode
        orients = cfg.orientations
        self.await_ctxs: list[AwaitCtx] = []
        self.await_ctx_id: dict[tuple, int] = {}

        def add_await(handler, args, slots):
            self.await_ctx_id[(handler, args)] = len(self.await_ctxs)
            self.await_ctxs.append(AwaitCtx(handler, args, tuple(slots)))

        for l, s in cfg.pairs():
            add_await(HandlerId.GATE_OPEN, (l, s),
                      [ReadSlot(ActionKind.ENTERING_LIGHT_SENSOR, (l, s, o)) for o in orients]
                      + [ReadSlot(ActionKind.LEAVING_LIGHT_SENSOR, (l, s, o)) for o in orients])
        for l, s in cfg.pairs():
            add_await(HandlerId.ENTERING_GREEN, (l, s),
                      [ReadSlot(ActionKind.LEAVING_LIGHT_SENSOR, (l, s, o)) for o in orients])
        for l, s in cfg.pairs():
            add_await(HandlerId.LEAVING_GREEN, (l, s),
                      [ReadSlot(ActionKind.ENTERING_LIGHT_SENSOR, (l, s, o)) for o in orients])
        if cfg.include_barrier:
            add_await(HandlerId.BARRIER_OPEN, (),
                      [ReadSlot(ActionKind.BARRIER_LIGHT_SENSOR, (s, o))
                       for s in cfg.sides for o in orients])

        self.emit_ctxs: list[EmitCtx] = []
        self.emit_ctx_id: dict[tuple, int] = {}

        def add_emit(name, args, queue):
            self.emit_ctx_id[(name, args)] = len(self.emit_ctxs)
            self.emit_ctxs.append(EmitCtx(name, args, tuple(enc(a) for a in queue)))

        AC, DL, SL = ActuatorCommand, DoubleLight, SingleLight
        for l in cfg.locks:
            # one variant per post-emergency entering aspect combination
            for a_up in (DL.SINGLE_RED, DL.REDRED):
                for a_down in (DL.SINGLE_RED, DL.REDRED):
                    aspects = {StreamSide.UPSTREAM: a_up, StreamSide.DOWNSTREAM: a_down}
                    q = [Action(ActionKind.GATE_ACTUATOR, (l, s, o, AC.DO_EMERGENCY_STOP))
                         for s in cfg.sides for o in orients]
                    q += [Action(ActionKind.PADDLE_ACTUATOR, (l, s, o, AC.DO_EMERGENCY_STOP))
                          for s in cfg.sides for o in orients]
                    q += [Action(ActionKind.ENTERING_LIGHT_ACTUATOR, (l, s, o, aspects[s]))
                          for s in cfg.sides for o in orients]
                    q += [Action(ActionKind.LEAVING_LIGHT_ACTUATOR, (l, s, o, SL.RED))
                          for s in cfg.sides for o in orients]
                    add_emit("em_lock", (l, DBL_CODE[a_up], DBL_CODE[a_down]), q)
        for l, s in cfg.pairs():
            add_emit("gate_open_fire", (l, s),
                     [Action(ActionKind.GATE_ACTUATOR, (l, s, o, AC.DO_OPEN)) for o in orients])
            add_emit("gate_close", (l, s),
                     [Action(ActionKind.GATE_ACTUATOR, (l, s, o, AC.DO_CLOSE)) for o in orients])
            stop_q = [Action(ActionKind.GATE_ACTUATOR, (l, s, o, AC.DO_EMERGENCY_STOP))
                      for o in orients]
            if not (self.mutation and self.mutation.skip_light_red_on_gate_stop):
                stop_q += [Action(ActionKind.ENTERING_LIGHT_ACTUATOR, (l, s, o, DL.SINGLE_RED))
                           for o in orients]
                stop_q += [Action(ActionKind.LEAVING_LIGHT_ACTUATOR, (l, s, o, SL.RED))
                           for o in orients]
            add_emit("gate_stop", (l, s), stop_q)
            add_emit("paddle_open", (l, s),
                     [Action(ActionKind.PADDLE_ACTUATOR, (l, s, o, AC.DO_OPEN)) for o in orients])
            add_emit("paddle_close", (l, s),
                     [Action(ActionKind.PADDLE_ACTUATOR, (l, s, o, AC.DO_CLOSE)) for o in orients])
            add_emit("paddle_stop", (l, s),
                     [Action(ActionKind.PADDLE_ACTUATOR, (l, s, o, AC.DO_EMERGENCY_STOP))
                      for o in orients])
            for c in (DL.SINGLE_RED, DL.REDRED, DL.REDGREEN, DL.SINGLE_GREEN):
                add_emit("enter_set", (l, s, DBL_CODE[c]),
                         [Action(ActionKind.ENTERING_LIGHT_ACTUATOR, (l, s, o, c))
                          for o in orients])
            add_emit("leave_red", (l, s),
                     [Action(ActionKind.LEAVING_LIGHT_ACTUATOR, (l, s, o, SL.RED))
                      for o in orients])
            add_emit("leave_green_fire", (l, s),
                     [Action(ActionKind.LEAVING_LIGHT_ACTUATOR, (l, s, o, SL.GREEN))
                      for o in orients])
        if cfg.include_barrier:
            blight_red = [Action(ActionKind.BARRIER_LIGHT_ACTUATOR, (s, o, SL.RED))
                          for s in cfg.sides for o in orients]
            add_emit("em_barrier", (),
                     [Action(ActionKind.BARRIER_ACTUATOR, (AC.DO_EMERGENCY_STOP,))] + blight_red)
            add_emit("barrier_open_fire", (),
                     [Action(ActionKind.BARRIER_ACTUATOR, (AC.DO_OPEN,))])
            add_emit("barrier_close", (),
                     [Action(ActionKind.BARRIER_ACTUATOR, (AC.DO_CLOSE,))])
            add_emit("barrier_stop", (),
                     [Action(ActionKind.BARRIER_ACTUATOR, (AC.DO_EMERGENCY_STOP,))] + blight_red)
            for s in cfg.sides:
                for c in (SL.RED, SL.GREEN):
                    add_emit("blight_set", (s, SGL_CODE[c]),
                             [Action(ActionKind.BARRIER_LIGHT_ACTUATOR, (s, o, c))
                              for o in orients])
        for which, ac in (("open", AC.DO_END_STOP_OPENING), ("close", AC.DO_END_STOP_CLOSING)):
            for d in cfg.devices():
                add_emit("gate_endstop", d + (which,),
                         [Action(ActionKind.GATE_ACTUATOR, d + (ac,))])
            for d in cfg.devices():
                add_emit("paddle_endstop", d + (which,),
                         [Action(ActionKind.PADDLE_ACTUATOR, d + (ac,))])
            if cfg.include_barrier:
                add_emit("barrier_endstop", (which,),
                         [Action(ActionKind.BARRIER_ACTUATOR, (ac,))])
        self.n_ctx = len(self.await_ctxs) + len(self.emit_ctxs)
        self.emit_ctx_base = len(self.await_ctxs)

    def _build_mode_fields(self):
        ctx_bits = max(1, (self.n_ctx - 1).bit_length())
        max_q = max((len(c.queue_ids) for c in self.emit_ctxs), default=1)
        max_r = max((len(c.slots) for c in self.await_ctxs), default=1)
        pos_bits = max(1, (max(max_q, max_r) - 1).bit_length())
        o = self.params_bits
        self.tag_off = o
        o += 2
        self.ctx_off = o
        o += ctx_bits
        self.pos_off = o
        o += pos_bits
        self.ok_off = o
        o += 1
        self.total_bits = o
        self.all_mask = (1 << o) - 1
        self.mode_mask = self.all_mask ^ self.params_mask
        self.fits_u64 = o <= 64

    def _await_bits(self, ctx_idx: int, pos: int, ok: int) -> int:
        return (TAG_AWAITING << self.tag_off) | (ctx_idx << self.ctx_off) \
            | (pos << self.pos_off) | (ok << self.ok_off)

    def _emit_bits_raw(self, ctx_idx: int, pos: int) -> int:
        return (TAG_EMITTING << self.tag_off) \
            | ((self.emit_ctx_base + ctx_idx) << self.ctx_off) | (pos << self.pos_off)

    def _build_canonical_map(self):
        # equal remaining queues are the same emitting state; first declaration wins
        self.suffix_canon: dict[tuple, int] = {}
        self.emit_bits_canon: list[list[int]] = []
        for ci, ctx in enumerate(self.emit_ctxs):
            per_pos = []
            for pos in range(len(ctx.queue_ids)):
                suffix = ctx.queue_ids[pos:]
                if suffix not in self.suffix_canon:
                    self.suffix_canon[suffix] = self._emit_bits_raw(ci, pos)
                per_pos.append(self.suffix_canon[suffix])
            self.emit_bits_canon.append(per_pos)

    def emit_bits(self, name: str, args: tuple, pos: int = 0) -> int:
        return self.emit_bits_canon[self.emit_ctx_id[(name, args)]][pos]

    # ------------------------------------------------------------------
    # awaiting / emitting step tables
    # ------------------------------------------------------------------

    def _fire_surgery(self, ctx: AwaitCtx):
        """Field updates applied when an awaiting handler's checks all pass."""
        clear = 0
        setbits = 0
        if ctx.handler is HandlerId.GATE_OPEN:
            l, s = ctx.args
            for o in self.config.orientations:
                off = self.gate_off[(l, s, o)]
                clear |= 3 << off
                setbits |= POS_CODE[Position.OPENING] << off
            fire = self.emit_bits("gate_open_fire", (l, s))
        elif ctx.handler is HandlerId.ENTERING_GREEN:
            l, s = ctx.args
            off = self.entering_off[(l, s)]
            clear |= 3 << off
            setbits |= DBL_CODE[DoubleLight.SINGLE_GREEN] << off
            fire = self.emit_bits("enter_set", (l, s, DBL_CODE[DoubleLight.SINGLE_GREEN]))
        elif ctx.handler is HandlerId.LEAVING_GREEN:
            l, s = ctx.args
            off = self.leaving_off[(l, s)]
            clear |= 1 << off
            setbits |= SGL_CODE[SingleLight.GREEN] << off
            fire = self.emit_bits("leave_green_fire", (l, s))
        else:
            clear |= 3 << self.bstatus_off
            setbits |= POS_CODE[Position.OPENING] << self.bstatus_off
            fire = self.emit_bits("barrier_open_fire", ())
        return clear, setbits, fire

    def _build_await_tables(self):
        # per await ctx: per position: response action ids, acceptance bits
        self.await_resp_ids: list[list[list[int]]] = []
        self.await_acc: list[list[list[int]]] = []
        self.await_fire: list[tuple[int, int, int]] = []
        for ctx in self.await_ctxs:
            ids_per_pos, acc_per_pos = [], []
            for slot in ctx.slots:
                values = list(slot.status_type)
                ids_per_pos.append([self.alphabet.encode(slot.with_status(v)) for v in values])
                acc_per_pos.append([int(_read_ok(ctx.handler, slot, v, self.mutation))
                                    for v in values])
            self.await_resp_ids.append(ids_per_pos)
            self.await_acc.append(acc_per_pos)
            self.await_fire.append(self._fire_surgery(ctx))
        # emitting: action emitted at each (ctx, pos)
        self.emit_out: list[tuple[int, ...]] = [c.queue_ids for c in self.emit_ctxs]
        if self.fits_u64:
            max_q = max((len(q) for q in self.emit_out), default=1)
            self._emit_out_tab = np.zeros((len(self.emit_out), max_q), dtype=np.int64)
            self._emit_next_tab = np.zeros((len(self.emit_out), max_q), dtype=np.uint64)
            for i, q in enumerate(self.emit_out):
                for j, aid in enumerate(q):
                    self._emit_out_tab[i, j] = aid
                    self._emit_next_tab[i, j] = (
                        self.emit_bits_canon[i][j + 1] if j + 1 < len(q) else 0)

    # ------------------------------------------------------------------
    # pack / unpack
    # ------------------------------------------------------------------

    def pack_params(self, p: ControllerParams) -> int:
        v = 0
        for d, off in self.gate_off.items():
            v |= POS_CODE[p.gate_status[d]] << off
        for d, off in self.paddle_off.items():
            v |= POS_CODE[p.paddle_status[d]] << off
        for pr, off in self.entering_off.items():
            v |= DBL_CODE[p.entering_light_set[pr]] << off
        for pr, off in self.leaving_off.items():
            v |= SGL_CODE[p.leaving_light_set[pr]] << off
        for pr, off in self.water_off.items():
            v |= int(p.water_equal[pr]) << off
        for l, off in self.lockem_off.items():
            v |= int(l in p.locks_in_emergency) << off
        if self.config.include_barrier:
            v |= POS_CODE[p.barrier_status] << self.bstatus_off
            v |= int(p.barrier_in_emergency) << self.bem_off
            for s, off in self.blight_off.items():
                v |= SGL_CODE[p.barrier_light_set[s]] << off
        return v

    def unpack_params(self, v: int) -> ControllerParams:
        g = {d: POS_DECODE[(v >> off) & 3] for d, off in self.gate_off.items()}
        pd = {d: POS_DECODE[(v >> off) & 3] for d, off in self.paddle_off.items()}
        ent = {pr: DBL_DECODE[(v >> off) & 3] for pr, off in self.entering_off.items()}
        lv = {pr: SGL_DECODE[(v >> off) & 1] for pr, off in self.leaving_off.items()}
        wt = {pr: bool((v >> off) & 1) for pr, off in self.water_off.items()}
        em = frozenset(l for l, off in self.lockem_off.items() if (v >> off) & 1)
        if self.config.include_barrier:
            bs = POS_DECODE[(v >> self.bstatus_off) & 3]
            bem = bool((v >> self.bem_off) & 1)
            bl = {s: SGL_DECODE[(v >> off) & 1] for s, off in self.blight_off.items()}
        else:
            bs, bem, bl = None, False, {}
        return ControllerParams(
            barrier_status=bs, barrier_in_emergency=bem,
            barrier_light_set=FrozenMap(bl), gate_status=FrozenMap(g),
            paddle_status=FrozenMap(pd), entering_light_set=FrozenMap(ent),
            leaving_light_set=FrozenMap(lv), water_equal=FrozenMap(wt),
            locks_in_emergency=em)

    def pack(self, state: ControllerState) -> int:
        v = self.pack_params(state.params)
        mode = state.mode
        if isinstance(mode, Stable):
            return v
        if isinstance(mode, Awaiting):
            ci = self.await_ctx_id[(mode.handler, mode.handler_args)]
            ctx = self.await_ctxs[ci]
            pos = len(ctx.slots) - len(mode.reads_remaining)
            if ctx.slots[pos:] != mode.reads_remaining:
                raise DomainError("awaiting reads do not match any handler context")
            return v | self._await_bits(ci, pos, int(mode.ok_so_far))
        ids = tuple(self.alphabet.encode(a) for a in mode.queue)
        bits = self.suffix_canon.get(ids)
        if bits is None:
            raise DomainError("emitting queue does not match any handler context")
        return v | bits

    def unpack(self, v: int) -> ControllerState:
        params = self.unpack_params(v & self.params_mask)
        tag = (v >> self.tag_off) & 3
        if tag == TAG_STABLE:
            return ControllerState(params)
        ctx_idx = (v >> self.ctx_off) & ((1 << (self.pos_off - self.ctx_off)) - 1)
        pos = (v >> self.pos_off) & ((1 << (self.ok_off - self.pos_off)) - 1)
        if tag == TAG_AWAITING:
            ctx = self.await_ctxs[ctx_idx]
            ok = bool((v >> self.ok_off) & 1)
            return ControllerState(params, Awaiting(ctx.handler, ctx.args,
                                                    ctx.slots[pos:], ok))
        ctx = self.emit_ctxs[ctx_idx - self.emit_ctx_base]
        queue = tuple(self.alphabet.decode(i) for i in ctx.queue_ids[pos:])
        return ControllerState(params, Emitting(queue, params))

    # ------------------------------------------------------------------
    # stable-input kernels (single definition, scalar and vector instances)
    # ------------------------------------------------------------------

    def _build_kernels(self):
        factories = {}
        for aid, action in enumerate(self.alphabet.actions):
            factories[aid] = self._kernel_factory(action)
        self.kernels_scalar = [factories[aid](_ScalarOps) for aid in range(len(self.alphabet))]
        if self.fits_u64:
            self.kernels_vector = [factories[aid](_VectorOps) for aid in range(len(self.alphabet))]
        else:
            self.kernels_vector = None

    def _kernel_factory(self, action: Action):
        """Successor function for one stable-state input action."""
        cfg, kind, args, m = self.config, action.kind, action.args, self.mutation

        if kind is ActionKind.SKIP or kind in (
                ActionKind.GATE_ACTUATOR, ActionKind.PADDLE_ACTUATOR,
                ActionKind.BARRIER_ACTUATOR, ActionKind.ENTERING_LIGHT_ACTUATOR,
                ActionKind.LEAVING_LIGHT_ACTUATOR, ActionKind.BARRIER_LIGHT_ACTUATOR,
                ActionKind.ENTERING_LIGHT_SENSOR, ActionKind.LEAVING_LIGHT_SENSOR,
                ActionKind.BARRIER_LIGHT_SENSOR):
            # outputs and inline reads are never stable inputs; skip is identity
            return lambda ops: (lambda p: p)

        if kind is ActionKind.WATER_SENSOR:
            l, s, w = args
            bit = 1 << self.water_off[(l, s)]
            setv = bit if w is WaterLevel.EQUAL else 0
            inv = self.all_mask ^ bit
            return lambda ops: (lambda p: (p & inv) | setv)

        if kind is ActionKind.EMERGENCY_LOCK_COMMAND:
            l, cmd = args
            embit = 1 << self.lockem_off[l]
            inv_em = self.all_mask ^ embit
            if cmd is EmergencyCommand.DEACTIVATE:
                return lambda ops: (lambda p: p & inv_em)
            e_up = self.entering_off[(l, StreamSide.UPSTREAM)]
            e_down = self.entering_off[(l, StreamSide.DOWNSTREAM)]
            clear = (3 << e_up) | (3 << e_down) | sum(
                1 << self.leaving_off[(l, s)] for s in cfg.sides)
            inv_clear = self.all_mask ^ clear
            base = self.emit_ctx_id[("em_lock", (l, 0, 0))]
            emit_table = [self.emit_bits_canon[base + 2 * u + d][0]
                          for u in (0, 1) for d in (0, 1)]

            def build(ops):
                emap = ops.table(_LUT_EMERGENCY_ASPECT)
                ebits = ops.table(emit_table)

                def kernel(p):
                    nu = ops.lut(emap, (p >> e_up) & 3)
                    nd = ops.lut(emap, (p >> e_down) & 3)
                    cont = (p & inv_clear) | (nu << e_up) | (nd << e_down) | embit
                    return cont | ops.lut(ebits, 2 * nu + nd)
                return kernel
            return build

        if kind is ActionKind.GATE_COMMAND:
            l, s, cmd = args
            opp = opposite(s)
            e_off = self.entering_off[(l, s)]
            l_off = self.leaving_off[(l, s)]
            w_bit = 1 << self.water_off[(l, s)]
            em_bit = 1 << self.lockem_off[l]
            opp_gates = [self.gate_off[(l, opp, o)] for o in cfg.orientations]
            opp_paddles = [self.paddle_off[(l, opp, o)] for o in cfg.orientations]
            own_gates = [self.gate_off[(l, s, o)] for o in cfg.orientations]
            if cmd is ConsoleCommand.OPEN:
                aw = self._await_bits(self.await_ctx_id[(HandlerId.GATE_OPEN, (l, s))], 0, 1)
                check_paddles = not (m and m.drop_opposite_paddle_check)
                check_water = not (m and m.drop_water_guard)

                def build(ops):
                    def kernel(p):
                        guard = ((p >> e_off) & 3) <= 1
                        guard = guard & (((p >> l_off) & 1) == 0)
                        guard = guard & ((p & em_bit) == 0)
                        if check_water:
                            guard = guard & ((p & w_bit) != 0)
                        for off in opp_gates:
                            guard = guard & (((p >> off) & 3) == 0)
                        if check_paddles:
                            for off in opp_paddles:
                                guard = guard & (((p >> off) & 3) == 0)
                        return ops.where(guard, p | aw, p)
                    return kernel
                return build
            if cmd is ConsoleCommand.CLOSE:
                clear = sum(3 << off for off in own_gates)
                inv = self.all_mask ^ clear
                setv = sum(POS_CODE[Position.CLOSING] << off for off in own_gates)
                eb = self.emit_bits("gate_close", (l, s))
                check_em = not (m and m.drop_emergency_check_gate_close)

                def build(ops):
                    def kernel(p):
                        guard = (((p >> e_off) & 3) <= 1) & (((p >> l_off) & 1) == 0)
                        if check_em:
                            guard = guard & ((p & em_bit) == 0)
                        return ops.where(guard, (p & inv) | setv | eb, p)
                    return kernel
                return build
            # stop: set both surrounding light set-points red, keep positions
            inv = self.all_mask ^ ((3 << e_off) | (1 << l_off))
            eb = self.emit_bits("gate_stop", (l, s))
            return lambda ops: (lambda p: (p & inv) | eb)

        if kind is ActionKind.PADDLE_COMMAND:
            l, s, cmd = args
            opp = opposite(s)
            em_bit = 1 << self.lockem_off[l]
            own = [self.paddle_off[(l, s, o)] for o in cfg.orientations]
            opp_offs = [self.gate_off[(l, opp, o)] for o in cfg.orientations] \
                + [self.paddle_off[(l, opp, o)] for o in cfg.orientations]
            if cmd is ConsoleCommand.OPEN:
                inv = self.all_mask ^ sum(3 << off for off in own)
                setv = sum(POS_CODE[Position.OPENING] << off for off in own)
                eb = self.emit_bits("paddle_open", (l, s))

                def build(ops):
                    def kernel(p):
                        guard = (p & em_bit) == 0
                        for off in opp_offs:
                            guard = guard & (((p >> off) & 3) == 0)
                        return ops.where(guard, (p & inv) | setv | eb, p)
                    return kernel
                return build
            if cmd is ConsoleCommand.CLOSE:
                inv = self.all_mask ^ sum(3 << off for off in own)
                setv = sum(POS_CODE[Position.CLOSING] << off for off in own)
                eb = self.emit_bits("paddle_close", (l, s))
                return lambda ops: (lambda p: ops.where(
                    (p & em_bit) == 0, (p & inv) | setv | eb, p))
            eb = self.emit_bits("paddle_stop", (l, s))
            return lambda ops: (lambda p: p | eb)

        if kind in (ActionKind.GATE_SENSOR, ActionKind.PADDLE_SENSOR):
            l, s, o, reported = args
            gate = kind is ActionKind.GATE_SENSOR
            off = (self.gate_off if gate else self.paddle_off)[(l, s, o)]
            kind_name = "gate_endstop" if gate else "paddle_endstop"
            eb_open = self.emit_bits(kind_name, (l, s, o, "open"))
            eb_close = self.emit_bits(kind_name, (l, s, o, "close"))
            if reported is SensorPosition.OPEN:
                lut, lut_emit, eb = _LUT_OPEN, _LUT_OPEN_EMIT, eb_open
            elif reported is SensorPosition.CLOSED:
                lut, lut_emit, eb = _LUT_CLOSED, _LUT_CLOSED_EMIT, eb_close
            else:
                lut, lut_emit, eb = _LUT_VAGUE, (0, 0, 0, 0), 0
            if gate and m and m.drop_endstop_condition:
                lut_emit, eb = (1, 1, 1, 1), eb_open
            inv = self.all_mask ^ (3 << off)

            def build(ops):
                t_new = ops.table(lut)
                t_emit = ops.table(lut_emit)

                def kernel(p):
                    old = (p >> off) & 3
                    base = (p & inv) | (ops.lut(t_new, old) << off)
                    return ops.where(ops.lut(t_emit, old) != 0, base | eb, base)
                return kernel
            return build

        if kind is ActionKind.ENTERING_LIGHT_COMMAND:
            l, s, c = args
            e_off = self.entering_off[(l, s)]
            l_off = self.leaving_off[(l, s)]
            code = DBL_CODE[c]
            inv_e = self.all_mask ^ (3 << e_off)
            if c in (DoubleLight.SINGLE_RED, DoubleLight.REDRED):
                eb = self.emit_bits("enter_set", (l, s, code))
                return lambda ops: (lambda p: (p & inv_e) | (code << e_off) | eb)
            if c is DoubleLight.REDGREEN:
                eb = self.emit_bits("enter_set", (l, s, code))
                unguarded = bool(m and m.drop_redgreen_guard)

                def build(ops):
                    def kernel(p):
                        succ = (p & inv_e) | (code << e_off) | eb
                        if unguarded:
                            return succ
                        return ops.where(((p >> l_off) & 1) == 0, succ, p)
                    return kernel
                return build
            gates = [self.gate_off[(l, s, o)] for o in cfg.orientations]
            aw = self._await_bits(self.await_ctx_id[(HandlerId.ENTERING_GREEN, (l, s))], 0, 1)

            def build(ops):
                def kernel(p):
                    guard = ((p >> l_off) & 1) == 0
                    for off in gates:
                        guard = guard & (((p >> off) & 3) == POS_CODE[Position.OPENED])
                    return ops.where(guard, p | aw, p)
                return kernel
            return build

        if kind is ActionKind.LEAVING_LIGHT_COMMAND:
            l, s, c = args
            e_off = self.entering_off[(l, s)]
            l_off = self.leaving_off[(l, s)]
            if c is SingleLight.RED:
                eb = self.emit_bits("leave_red", (l, s))
                inv = self.all_mask ^ (1 << l_off)
                return lambda ops: (lambda p: (p & inv) | eb)
            gates = [self.gate_off[(l, s, o)] for o in cfg.orientations]
            aw = self._await_bits(self.await_ctx_id[(HandlerId.LEAVING_GREEN, (l, s))], 0, 1)

            def build(ops):
                def kernel(p):
                    guard = ((p >> e_off) & 3) <= 1
                    for off in gates:
                        guard = guard & (((p >> off) & 3) == POS_CODE[Position.OPENED])
                    return ops.where(guard, p | aw, p)
                return kernel
            return build

        if kind is ActionKind.EMERGENCY_BARRIER_COMMAND:
            cmd, = args
            bem = 1 << self.bem_off
            inv_bem = self.all_mask ^ bem
            if cmd is EmergencyCommand.DEACTIVATE:
                return lambda ops: (lambda p: p & inv_bem)
            inv = self.all_mask ^ sum(1 << off for off in self.blight_off.values())
            eb = self.emit_bits("em_barrier", ())
            return lambda ops: (lambda p: (p & inv) | bem | eb)

        if kind is ActionKind.BARRIER_COMMAND:
            cmd, = args
            bem = 1 << self.bem_off
            lights = [1 << off for off in self.blight_off.values()]
            lights_mask = sum(lights)
            bs = self.bstatus_off
            inv_bs = self.all_mask ^ (3 << bs)
            if cmd is ConsoleCommand.OPEN:
                if m and m.barrier_open_unconditional:
                    eb = self.emit_bits("barrier_open_fire", ())
                    return lambda ops: (lambda p: (p & inv_bs)
                                        | (POS_CODE[Position.OPENING] << bs) | eb)
                aw = self._await_bits(self.await_ctx_id[(HandlerId.BARRIER_OPEN, ())], 0, 1)
                return lambda ops: (lambda p: ops.where(
                    ((p & lights_mask) == 0) & ((p & bem) == 0), p | aw, p))
            if cmd is ConsoleCommand.CLOSE:
                eb = self.emit_bits("barrier_close", ())
                return lambda ops: (lambda p: ops.where(
                    ((p & lights_mask) == 0) & ((p & bem) == 0),
                    (p & inv_bs) | (POS_CODE[Position.CLOSING] << bs) | eb, p))
            eb = self.emit_bits("barrier_stop", ())
            inv_lights = self.all_mask ^ lights_mask
            return lambda ops: (lambda p: (p & inv_lights) | eb)

        if kind is ActionKind.BARRIER_LIGHT_COMMAND:
            s, c = args
            off = self.blight_off[s]
            code = SGL_CODE[c]
            eb = self.emit_bits("blight_set", (s, code))
            inv = self.all_mask ^ (1 << off)
            if c is SingleLight.RED:
                return lambda ops: (lambda p: (p & inv) | eb)
            bs = self.bstatus_off
            return lambda ops: (lambda p: ops.where(
                ((p >> bs) & 3) == POS_CODE[Position.OPENED],
                (p & inv) | (code << off) | eb, p))

        if kind is ActionKind.BARRIER_SENSOR:
            reported, = args
            off = self.bstatus_off
            eb_open = self.emit_bits("barrier_endstop", ("open",))
            eb_close = self.emit_bits("barrier_endstop", ("close",))
            if reported is SensorPosition.OPEN:
                lut, lut_emit, eb = _LUT_OPEN, _LUT_OPEN_EMIT, eb_open
            elif reported is SensorPosition.CLOSED:
                lut, lut_emit, eb = _LUT_CLOSED, _LUT_CLOSED_EMIT, eb_close
            else:
                lut, lut_emit, eb = _LUT_VAGUE, (0, 0, 0, 0), 0
            inv = self.all_mask ^ (3 << off)

            def build(ops):
                t_new = ops.table(lut)
                t_emit = ops.table(lut_emit)

                def kernel(p):
                    old = (p >> off) & 3
                    base = (p & inv) | (ops.lut(t_new, old) << off)
                    return ops.where(ops.lut(t_emit, old) != 0, base | eb, base)
                return kernel
            return build

        raise AssertionError("unhandled action kind %r" % kind)

    # ------------------------------------------------------------------
    # scalar stepping
    # ------------------------------------------------------------------

    def tag_of(self, p: int) -> int:
        return (p >> self.tag_off) & 3

    def _ctx_pos_ok(self, p: int):
        ctx = (p >> self.ctx_off) & ((1 << (self.pos_off - self.ctx_off)) - 1)
        pos = (p >> self.pos_off) & ((1 << (self.ok_off - self.pos_off)) - 1)
        return ctx, pos, (p >> self.ok_off) & 1

    def enabled_ids(self, p: int) -> list[int]:
        tag = self.tag_of(p)
        if tag == TAG_STABLE:
            return self.stable_ids
        ctx, pos, _ = self._ctx_pos_ok(p)
        if tag == TAG_AWAITING:
            return self.await_resp_ids[ctx][pos]
        return [self.emit_out[ctx - self.emit_ctx_base][pos]]

    def step_packed(self, p: int, action_id: int) -> int:
        tag = self.tag_of(p)
        if tag == TAG_STABLE:
            return self.kernels_scalar[action_id](p)
        ctx, pos, ok = self._ctx_pos_ok(p)
        if tag == TAG_AWAITING:
            resp = self.await_resp_ids[ctx][pos]
            value = resp.index(action_id)
            ok2 = ok & self.await_acc[ctx][pos][value]
            params = p & self.params_mask
            if pos + 1 < len(self.await_ctxs[ctx].slots):
                return params | self._await_bits(ctx, pos + 1, ok2)
            if not ok2:
                return params
            clear, setbits, fire = self.await_fire[ctx]
            return ((params & ~clear) | setbits) | fire
        ei = ctx - self.emit_ctx_base
        assert self.emit_out[ei][pos] == action_id
        params = p & self.params_mask
        if pos + 1 < len(self.emit_out[ei]):
            return params | self.emit_bits_canon[ei][pos + 1]
        return params

    def random_walk(self, steps: int, seed: int, finish_burst: bool = True):
        """Seeded uniform walk; returns (action ids, final packed state)."""
        rng = random.Random(seed)
        p = self.initial_packed
        out = []
        n = 0
        while n < steps or (finish_burst and self.tag_of(p) != TAG_STABLE):
            ids = self.enabled_ids(p)
            aid = ids[rng.randrange(len(ids))]
            out.append(aid)
            p = self.step_packed(p, aid)
            n += 1
        return out, p

    # ------------------------------------------------------------------
    # vectorized expansion (exploration support)
    # ------------------------------------------------------------------

    def split_by_tag(self, states: np.ndarray):
        tags = (states >> np.uint64(self.tag_off)) & np.uint64(3)
        return tags == TAG_STABLE, tags == TAG_AWAITING, tags == TAG_EMITTING

    def expand_stable(self, states: np.ndarray):
        """Yield (action_id, successor array) for every stable-input action."""
        for aid in self.stable_ids:
            yield aid, self.kernels_vector[aid](states)

    def expand_awaiting(self, states: np.ndarray):
        """Yield (selector, action_id, successors) per (ctx, pos, response)."""
        ctx = (states >> np.uint64(self.ctx_off)) & np.uint64((1 << (self.pos_off - self.ctx_off)) - 1)
        pos = (states >> np.uint64(self.pos_off)) & np.uint64((1 << (self.ok_off - self.pos_off)) - 1)
        ok = (states >> np.uint64(self.ok_off)) & np.uint64(1)
        key = ctx * np.uint64(64) + pos
        for k in np.unique(key):
            sel = np.nonzero(key == k)[0]
            ci, po = int(k) // 64, int(k) % 64
            sub = states[sel]
            params = sub & np.uint64(self.params_mask)
            sub_ok = ok[sel]
            n_slots = len(self.await_ctxs[ci].slots)
            last = po + 1 >= n_slots
            clear, setbits, fire = self.await_fire[ci]
            for value, aid in enumerate(self.await_resp_ids[ci][po]):
                ok2 = sub_ok & np.uint64(self.await_acc[ci][po][value])
                if not last:
                    succ = params | np.uint64(self._await_bits(ci, po + 1, 0)) \
                        | (ok2 << np.uint64(self.ok_off))
                else:
                    fired = ((params & np.uint64(self.params_mask ^ clear))
                             | np.uint64(setbits) | np.uint64(fire))
                    succ = np.where(ok2 != 0, fired, params)
                yield sel, aid, succ

    def expand_emitting(self, states: np.ndarray):
        """Return (action ids, successors) for emitting states."""
        ctx = ((states >> np.uint64(self.ctx_off))
               & np.uint64((1 << (self.pos_off - self.ctx_off)) - 1)).astype(np.int64) \
            - self.emit_ctx_base
        pos = ((states >> np.uint64(self.pos_off))
               & np.uint64((1 << (self.ok_off - self.pos_off)) - 1)).astype(np.int64)
        acts = self._emit_out_tab[ctx, pos]
        params = states & np.uint64(self.params_mask)
        succ = params | self._emit_next_tab[ctx, pos]
        return acts, succ
