"""Session service: one live closed-loop simulation per connection.

Wire protocol v1, JSON records over WebSocket frames.

Client -> server::

    {"kind": "hello", "v": 1, "cid": ..., "seed": 0}
    {"kind": "command", "cid": ..., "action": "GateCommand(north,upstream,command_open)"}
    {"kind": "fault", "cid": ..., "fault": "stuck_aspect(green) leaving_light(north,upstream,east)", "on": true}
    {"kind": "tick_control", "cid": ..., "ticks": 5}           # manual ticks
    {"kind": "tick_control", "cid": ..., "auto_ms": 250}       # or null to stop
    {"kind": "tick_control", "cid": ..., "snapshot": true}

Server -> client: ``ack``/``error`` (echoing ``cid``), ``trace_event`` per
action, ``violation`` when a monitor first fires, ``state_snapshot`` on
change and on request.  Every client command is answered by exactly one ack
or error carrying its correlation id.
"""

from __future__ import annotations

import asyncio
import itertools
import json
import os
import threading

from websockets.asyncio.server import serve as ws_serve

from .catalog import catalog
from .controller import Mutation
from .domain import Alphabet, DomainError, PlantConfig, parse_action
from .monitor import ObligationMonitor, advance
from .plant import parse_fault
from .sim import ClosedLoop, Scenario, ScenarioEvent
from .traces import TraceRecord

PROTOCOL_VERSION = 1
_session_counter = itertools.count(1)


class Session:
    """Serialized event loop around one ClosedLoop plus attached monitors."""

    def __init__(self, service: "SessionService", seed: int):
        self.service = service
        self.config = service.config
        self.sid = "%d-%d" % (os.getpid(), next(_session_counter))
        self.outbox: list[dict] = []
        self.loop = ClosedLoop(self.config, seed=seed, mutation=service.mutation,
                               profile=service.profile, sink=self._on_record,
                               keep_records=False)
        self.alphabet = service.alphabet
        self.pattern_states = {rid: auto.fresh()
                               for rid, auto in service.automata.items()}
        self.obligation_monitors = {
            req.rid: ObligationMonitor(req.obligation, self.config)
            for req in service.obligation_reqs}
        self.reported: set[str] = set()
        self.events: list[ScenarioEvent] = []
        self._last_snapshot = None
        self.trace_fp = None
        if service.record_dir:
            os.makedirs(service.record_dir, exist_ok=True)
            self.trace_path = os.path.join(service.record_dir,
                                           "session-%s.trace" % self.sid)
            self.scenario_path = os.path.join(service.record_dir,
                                              "session-%s.scenario" % self.sid)
            self.trace_fp = open(self.trace_path, "w", encoding="utf-8")
            self.seed = seed
            self._rewrite_scenario()

    # ------------------------------------------------------------------

    def _on_record(self, rec: TraceRecord) -> None:
        self.outbox.append({"kind": "trace_event", "seq": rec.seq,
                            "record_kind": rec.kind, "action": rec.action.text()})
        if self.trace_fp:
            self.trace_fp.write(rec.line() + "\n")
            self.trace_fp.flush()
        aid = self.alphabet.encode(rec.action)
        for rid, auto in self.service.automata.items():
            st = self.pattern_states[rid]
            st2 = advance(auto, st, aid, rec.seq)
            self.pattern_states[rid] = st2
            if st2.verdict is not None and rid not in self.reported:
                self.reported.add(rid)
                seq, bi = st2.verdict
                self._violation(rid, seq, auto.bindings[bi].describe())
        for rid, mon in self.obligation_monitors.items():
            if rid in self.reported:
                continue
            mon.feed(rec)
            if mon.verdict is not None:
                self.reported.add(rid)
                self._violation(rid, mon.verdict[0], mon.verdict[1])

    def _violation(self, rid: str, seq: int, detail: str) -> None:
        self.outbox.append({"kind": "violation", "id": rid,
                            "title": self.service.cat[rid].title,
                            "seq": seq, "detail": detail})

    def _finish_bursts(self) -> None:
        for rid, mon in self.obligation_monitors.items():
            if rid in self.reported:
                continue
            mon.finish()
            if mon.verdict is not None:
                self.reported.add(rid)
                self._violation(rid, mon.verdict[0], mon.verdict[1])

    def _record_event(self, kind: str, payload: str) -> None:
        self.events.append(ScenarioEvent(self.loop.tick_count, kind, payload))
        if self.trace_fp:
            self._rewrite_scenario()

    def _rewrite_scenario(self) -> None:
        with open(self.scenario_path, "w", encoding="utf-8") as fp:
            fp.write("\n".join(Scenario(self.seed, tuple(self.events)).lines()) + "\n")

    # ------------------------------------------------------------------

    def snapshot_message(self) -> dict:
        params = self.loop.controller.params
        controller = {
            "barrier_status": params.barrier_status.value if params.barrier_status else None,
            "barrier_in_emergency": params.barrier_in_emergency,
            "barrier_light_set": {s.value: v.value
                                  for s, v in params.barrier_light_set.items()},
            "gate_status": {"%s/%s/%s" % (l.value, s.value, o.value): v.value
                            for (l, s, o), v in params.gate_status.items()},
            "paddle_status": {"%s/%s/%s" % (l.value, s.value, o.value): v.value
                              for (l, s, o), v in params.paddle_status.items()},
            "entering_light_set": {"%s/%s" % (l.value, s.value): v.value
                                   for (l, s), v in params.entering_light_set.items()},
            "leaving_light_set": {"%s/%s" % (l.value, s.value): v.value
                                  for (l, s), v in params.leaving_light_set.items()},
            "water_equal": {"%s/%s" % (l.value, s.value): v
                            for (l, s), v in params.water_equal.items()},
            "locks_in_emergency": sorted(l.value for l in params.locks_in_emergency),
        }
        return {"kind": "state_snapshot", "seq": self.loop.seq,
                "controller": controller, "plant": self.loop.plant.snapshot()}

    def maybe_snapshot(self, force: bool = False) -> None:
        msg = self.snapshot_message()
        key = json.dumps({k: msg[k] for k in ("controller", "plant")}, sort_keys=True)
        if force or key != self._last_snapshot:
            self._last_snapshot = key
            self.outbox.append(msg)

    def handle(self, msg: dict) -> None:
        """Apply one client message; replies accumulate in the outbox."""
        cid = msg.get("cid")
        kind = msg.get("kind")
        try:
            if kind == "command":
                action = parse_action(msg["action"])
                if not action.is_input():
                    raise DomainError("actuator actions cannot be commanded")
                self._record_event("command", action.text())
                self.loop.submit(action)
                self._finish_bursts()
                self.outbox.append({"kind": "ack", "cid": cid})
                self.maybe_snapshot()
            elif kind == "fault":
                fault = parse_fault(msg["fault"])
                on = bool(msg.get("on", True))
                self.loop.plant.inject_fault(fault, on)
                self._record_event("fault_on" if on else "fault_off", fault.text())
                self.outbox.append({"kind": "ack", "cid": cid})
                self.maybe_snapshot()
            elif kind == "tick_control":
                if msg.get("ticks"):
                    for _ in range(int(msg["ticks"])):
                        self.loop.do_tick()
                    self._finish_bursts()
                self.outbox.append({"kind": "ack", "cid": cid})
                self.maybe_snapshot(force=bool(msg.get("snapshot")))
            else:
                raise DomainError("unknown message kind %r" % kind)
        except (DomainError, KeyError, ValueError) as exc:
            self.outbox.append({"kind": "error", "cid": cid, "message": str(exc)})

    def drain(self) -> list[dict]:
        out, self.outbox = self.outbox, []
        return out

    def close(self) -> None:
        if self.trace_fp:
            self.trace_fp.close()


class SessionService:
    def __init__(self, config: PlantConfig, monitor_set=None,
                 mutation: Mutation | None = None, record_dir: str | None = None,
                 profile: dict | None = None):
        self.config = config
        self.mutation = mutation
        self.record_dir = record_dir
        self.profile = profile
        self.cat = catalog()
        self.alphabet = Alphabet(config)
        reqs = monitor_set if monitor_set is not None else [
            r for r in self.cat.values() if r.check_kind != "graph-liveness"]
        self.automata = {r.rid: r.compile(config, self.alphabet)
                         for r in reqs if r.check_kind == "pattern-monitor"}
        self.obligation_reqs = [r for r in reqs if r.check_kind == "obligation-monitor"]
        self.monitored_ids = [r.rid for r in reqs]

    def hello_info(self, session: Session) -> dict:
        return {
            "session": session.sid,
            "protocol": PROTOCOL_VERSION,
            "config": {
                "locks": [l.value for l in self.config.locks],
                "orientations": [o.value for o in self.config.orientations],
                "stream_sides": [s.value for s in self.config.sides],
                "include_barrier": self.config.include_barrier,
            },
            "requirements": [
                {"id": r.rid, "title": r.title, "category": r.category,
                 "monitored": r.rid in self.monitored_ids}
                for r in self.cat.values()],
        }

    async def handler(self, websocket) -> None:
        session: Session | None = None
        auto_task: asyncio.Task | None = None
        lock = asyncio.Lock()

        async def send_all(msgs):
            for m in msgs:
                await websocket.send(json.dumps(m))

        async def auto_runner(interval_ms: int):
            while True:
                await asyncio.sleep(interval_ms / 1000.0)
                async with lock:
                    session.loop.do_tick()
                    session._finish_bursts()
                    session.maybe_snapshot()
                    await send_all(session.drain())

        try:
            async for raw in websocket:
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await websocket.send(json.dumps(
                        {"kind": "error", "cid": None, "message": "malformed JSON"}))
                    continue
                if session is None:
                    if msg.get("kind") != "hello" or msg.get("v") != PROTOCOL_VERSION:
                        await websocket.send(json.dumps(
                            {"kind": "error", "cid": msg.get("cid"),
                             "message": "protocol version mismatch; expected v=%d"
                                        % PROTOCOL_VERSION}))
                        await websocket.close(code=1002, reason="version mismatch")
                        return
                    session = Session(self, int(msg.get("seed") or 0))
                    await websocket.send(json.dumps(
                        {"kind": "ack", "cid": msg.get("cid"),
                         "info": self.hello_info(session)}))
                    session.maybe_snapshot(force=True)
                    await send_all(session.drain())
                    continue
                if msg.get("kind") == "tick_control" and "auto_ms" in msg:
                    if auto_task:
                        auto_task.cancel()
                        auto_task = None
                    if msg["auto_ms"]:
                        auto_task = asyncio.create_task(auto_runner(int(msg["auto_ms"])))
                    await websocket.send(json.dumps({"kind": "ack", "cid": msg.get("cid")}))
                    continue
                async with lock:
                    session.handle(msg)
                    await send_all(session.drain())
        finally:
            if auto_task:
                auto_task.cancel()
            if session:
                session.close()


class ServiceRunner:
    """Runs the websocket server on a background thread (tests, CLI)."""

    def __init__(self, service: SessionService, host: str = "127.0.0.1", port: int = 0):
        self.service = service
        self.host = host
        self.port = port
        self._ready = threading.Event()
        self._stop: asyncio.Event | None = None
        self._thread: threading.Thread | None = None

    def start(self) -> "ServiceRunner":
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()
        if not self._ready.wait(timeout=10):
            raise RuntimeError("service failed to start")
        return self

    def _run(self) -> None:
        asyncio.run(self._main())

    async def _main(self) -> None:
        self._stop = asyncio.Event()
        self._loop = asyncio.get_running_loop()
        async with ws_serve(self.service.handler, self.host, self.port) as server:
            self.port = server.sockets[0].getsockname()[1]
            self._ready.set()
            await self._stop.wait()

    def stop(self) -> None:
        if self._stop is not None:
            self._loop.call_soon_threadsafe(self._stop.set)
        if self._thread:
            self._thread.join(timeout=10)

    @property
    def url(self) -> str:
        return "ws://%s:%d" % (self.host, self.port)


def serve(config: PlantConfig, port: int, monitor_set=None,
          mutation: Mutation | None = None, record_dir: str | None = None,
          host: str = "0.0.0.0") -> None:
    """Blocking entry point used by the CLI."""
    service = SessionService(config, monitor_set, mutation, record_dir)

    async def main():
        async with ws_serve(service.handler, host, port) as server:
            bound = server.sockets[0].getsockname()[1]
            print("lockplex service listening on ws://%s:%d" % (host, bound), flush=True)
            await asyncio.get_running_loop().create_future()

    asyncio.run(main())
