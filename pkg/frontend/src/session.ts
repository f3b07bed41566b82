/** WebSocket session wrapper: hello handshake, correlated dispatch, and the
 *  message fold into the view model.  Gestures are disabled until their
 *  ack/error arrives (one command per correlation id). */

import { PROTOCOL_VERSION, parseServerMessage } from "./protocol.js";
import {
  ConsoleViewModel, applyMessage, closed, initialView, withPending,
} from "./viewmodel.js";

export interface WebSocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: string, listener: (event: any) => void): void;
}

export type WebSocketFactory = (url: string) => WebSocketLike;

export class ConsoleSession {
  view: ConsoleViewModel = initialView();
  private ws: WebSocketLike;
  private cid = 0;
  private listeners: ((view: ConsoleViewModel) => void)[] = [];

  constructor(url: string, factory?: WebSocketFactory, private seed = 0) {
    const make = factory ?? ((u: string) => new (globalThis as any).WebSocket(u));
    this.ws = make(url);
    this.ws.addEventListener("open", () => {
      this.send({ kind: "hello", v: PROTOCOL_VERSION, seed: this.seed });
    });
    this.ws.addEventListener("message", (event: { data: unknown }) => {
      const raw = typeof event.data === "string" ? event.data : String(event.data);
      const msg = parseServerMessage(raw);
      if (msg) this.update(applyMessage(this.view, msg));
    });
    this.ws.addEventListener("close", () => this.update(closed(this.view)));
  }

  onChange(listener: (view: ConsoleViewModel) => void): void {
    this.listeners.push(listener);
    listener(this.view);
  }

  private update(view: ConsoleViewModel): void {
    this.view = view;
    for (const l of this.listeners) l(view);
  }

  private send(msg: Record<string, unknown>): number {
    const cid = ++this.cid;
    this.ws.send(JSON.stringify({ ...msg, cid }));
    return cid;
  }

  /** Issue one operator command (exactly one message per gesture). */
  dispatch(action: string): number {
    const cid = this.send({ kind: "command", action });
    this.update(withPending(this.view, cid, action));
    return cid;
  }

  toggleFault(fault: string, on: boolean): number {
    const cid = this.send({ kind: "fault", fault, on });
    this.update(withPending(this.view, cid, fault));
    return cid;
  }

  ticks(n: number): number {
    const cid = this.send({ kind: "tick_control", ticks: n });
    this.update(withPending(this.view, cid, "tick"));
    return cid;
  }

  autoTicks(intervalMs: number | null): number {
    return this.send({ kind: "tick_control", auto_ms: intervalMs });
  }

  requestSnapshot(): number {
    return this.send({ kind: "tick_control", snapshot: true });
  }

  close(): void {
    this.ws.close();
  }

  /** Resolves once the view satisfies the predicate (test helper). */
  waitFor(pred: (view: ConsoleViewModel) => boolean,
          timeoutMs = 5000): Promise<ConsoleViewModel> {
    return new Promise((resolve, reject) => {
      if (pred(this.view)) return resolve(this.view);
      const timer = setTimeout(
        () => reject(new Error("timeout waiting for view condition")), timeoutMs);
      this.onChange(view => {
        if (pred(view)) {
          clearTimeout(timer);
          resolve(view);
        }
      });
    });
  }
}
