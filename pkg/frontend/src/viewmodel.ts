/** The console's entire state is a pure fold of received server messages
 *  plus the user's own pending commands — the client simulates nothing. */

import {
  ControllerSnapshot, HelloInfo, PlantSnapshot, RequirementInfo,
  ServerMessage, TraceEventMessage, ViolationMessage, parseLightRead,
} from "./protocol.js";

export type Connection = "connecting" | "ready" | "refused" | "closed";

export interface ViolationEntry extends ViolationMessage {}

export interface ConsoleViewModel {
  connection: Connection;
  banner: string | null;               // blocking error (version mismatch)
  session: string | null;
  info: HelloInfo | null;
  controller: ControllerSnapshot | null;
  plant: PlantSnapshot | null;
  lastRead: Record<string, string>;    // light key -> last inline reading
  trace: TraceEventMessage[];          // scrolling window, newest last
  violations: ViolationEntry[];
  pending: Record<number, string>;     // cid -> gesture label (buttons disable)
  lastError: string | null;            // last non-fatal error reply
  seq: number;
}

export const TRACE_WINDOW = 200;

export function initialView(): ConsoleViewModel {
  return {
    connection: "connecting",
    banner: null,
    session: null,
    info: null,
    controller: null,
    plant: null,
    lastRead: {},
    trace: [],
    violations: [],
    pending: {},
    lastError: null,
    seq: -1,
  };
}

export function applyMessage(view: ConsoleViewModel,
                             msg: ServerMessage): ConsoleViewModel {
  switch (msg.kind) {
    case "ack": {
      const pending = { ...view.pending };
      if (msg.cid !== null) delete pending[msg.cid];
      if (msg.info) {
        return { ...view, connection: "ready", session: msg.info.session,
                 info: msg.info, pending };
      }
      return { ...view, pending };
    }
    case "error": {
      const pending = { ...view.pending };
      const wasHello = view.connection === "connecting";
      if (msg.cid !== null) delete pending[msg.cid];
      if (wasHello) {
        return { ...view, connection: "refused", banner: msg.message, pending };
      }
      return { ...view, lastError: msg.message, pending };
    }
    case "trace_event": {
      const trace = view.trace.length >= TRACE_WINDOW
        ? [...view.trace.slice(-(TRACE_WINDOW - 1)), msg]
        : [...view.trace, msg];
      let lastRead = view.lastRead;
      if (msg.record_kind === "read") {
        const read = parseLightRead(msg.action);
        if (read) lastRead = { ...view.lastRead, [read[0]]: read[1] };
      }
      return { ...view, trace, lastRead, seq: msg.seq };
    }
    case "state_snapshot":
      return { ...view, controller: msg.controller, plant: msg.plant,
               seq: Math.max(view.seq, msg.seq) };
    case "violation":
      if (view.violations.some(v => v.id === msg.id && v.seq === msg.seq)) {
        return view;
      }
      return { ...view, violations: [...view.violations, msg] };
  }
}

export function withPending(view: ConsoleViewModel, cid: number,
                            label: string): ConsoleViewModel {
  return { ...view, pending: { ...view.pending, [cid]: label } };
}

export function closed(view: ConsoleViewModel): ConsoleViewModel {
  if (view.connection === "refused") return view;
  return { ...view, connection: "closed" };
}

export function requirementTitle(view: ConsoleViewModel, id: string): string {
  const req = view.info?.requirements.find((r: RequirementInfo) => r.id === id);
  return req ? req.title : id;
}
