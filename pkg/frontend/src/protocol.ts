/** Wire protocol v1 of the session service: JSON records over WebSocket. */

export const PROTOCOL_VERSION = 1;

export interface ConfigInfo {
  locks: string[];
  orientations: string[];
  stream_sides: string[];
  include_barrier: boolean;
}

export interface RequirementInfo {
  id: string;
  title: string;
  category: string;
  monitored: boolean;
}

export interface HelloInfo {
  session: string;
  protocol: number;
  config: ConfigInfo;
  requirements: RequirementInfo[];
}

export interface AckMessage {
  kind: "ack";
  cid: number | null;
  info?: HelloInfo;
}

export interface ErrorMessage {
  kind: "error";
  cid: number | null;
  message: string;
}

export interface TraceEventMessage {
  kind: "trace_event";
  seq: number;
  record_kind: "input" | "read" | "output";
  action: string;
}

export interface ControllerSnapshot {
  barrier_status: string | null;
  barrier_in_emergency: boolean;
  barrier_light_set: Record<string, string>;
  gate_status: Record<string, string>;
  paddle_status: Record<string, string>;
  entering_light_set: Record<string, string>;
  leaving_light_set: Record<string, string>;
  water_equal: Record<string, boolean>;
  locks_in_emergency: string[];
}

export interface PlantSnapshot {
  tick: number;
  positions: Record<string, number>;
  motions: Record<string, string>;
  aspects: Record<string, string>;
  water: Record<string, number>;
  faults: string[];
  travel: number;
}

export interface SnapshotMessage {
  kind: "state_snapshot";
  seq: number;
  controller: ControllerSnapshot;
  plant: PlantSnapshot;
}

export interface ViolationMessage {
  kind: "violation";
  id: string;
  title: string;
  seq: number;
  detail: string;
}

export type ServerMessage =
  | AckMessage
  | ErrorMessage
  | TraceEventMessage
  | SnapshotMessage
  | ViolationMessage;

export function parseServerMessage(raw: string): ServerMessage | null {
  let msg: unknown;
  try {
    msg = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof msg !== "object" || msg === null || !("kind" in msg)) return null;
  const kind = (msg as { kind: unknown }).kind;
  if (kind === "ack" || kind === "error" || kind === "trace_event" ||
      kind === "state_snapshot" || kind === "violation") {
    return msg as ServerMessage;
  }
  return null;
}

/** Extract a light key and status from an inline read action text, e.g.
 *  `LeavingTrafficLightSensor(north,upstream,east,show(red))` ->
 *  ["leaving_light:north/upstream/east", "show(red)"]. */
export function parseLightRead(action: string): [string, string] | null {
  const match = /^(Entering|Leaving|Barrier)TrafficLightSensor\((.*)\)$/.exec(action);
  if (!match) return null;
  const prefix = { Entering: "entering_light", Leaving: "leaving_light",
                   Barrier: "barrier_light" }[match[1] as "Entering"];
  const body = match[2];
  const cut = body.search(/,(?=show\(|fail)/);
  if (cut < 0) return null;
  const args = body.slice(0, cut).split(",");
  const status = body.slice(cut + 1);
  return [`${prefix}:${args.join("/")}`, status];
}
