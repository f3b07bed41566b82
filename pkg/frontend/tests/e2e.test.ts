/** Round trip against a live session service: the console issues every
 *  external command kind, renders the resulting snapshots, surfaces a
 *  stuck-green light divergence, and displays a violation streamed by a
 *  deliberately mutated server build with its verbatim title. */

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { render } from "../src/render.js";
import { ConsoleSession, WebSocketLike } from "../src/session.js";

const wsFactory = (url: string) => new WebSocket(url) as unknown as WebSocketLike;

function startService(extra: string[] = []): Promise<{ proc: ChildProcess; url: string }> {
  return new Promise((resolve, reject) => {
    const proc = spawn("python3", ["-m", "lockplex.cli", "serve",
                                   "--config", "full", "--host", "127.0.0.1",
                                   "--port", "0", ...extra],
                       { stdio: ["ignore", "pipe", "pipe"] });
    let buffer = "";
    const timer = setTimeout(() => reject(new Error("service did not start")), 15000);
    proc.stdout!.on("data", chunk => {
      buffer += String(chunk);
      const match = /ws:\/\/[\w.]+:(\d+)/.exec(buffer);
      if (match) {
        clearTimeout(timer);
        resolve({ proc, url: `ws://127.0.0.1:${match[1]}` });
      }
    });
    proc.on("exit", code => reject(new Error(`service exited early: ${code}`)));
  });
}

describe("console against a live service", () => {
  let service: { proc: ChildProcess; url: string };

  beforeAll(async () => {
    service = await startService();
  }, 20000);

  afterAll(() => {
    service?.proc.kill();
  });

  it("connects, drives every command kind and renders snapshots", async () => {
    const session = new ConsoleSession(service.url, wsFactory);
    const view = await session.waitFor(v => v.connection === "ready" && !!v.controller);
    expect(view.info!.requirements).toHaveLength(53);
    expect(render(view)).toContain("flood barrier (opened)");

    // one command of every external input kind
    const commands = [
      "GateCommand(north,upstream,command_stop)",
      "PaddleCommand(north,upstream,command_stop)",
      "EmergencyLockCommand(south,activate)",
      "BarrierCommand(command_stop)",
      "EmergencyBarrierCommand(activate)",
      "EnteringTrafficLightCommand(north,upstream,redred)",
      "LeavingTrafficLightCommand(north,downstream,red)",
      "BarrierTrafficLightCommand(upstream,red)",
    ];
    for (const action of commands) {
      const cid = session.dispatch(action);
      expect(session.view.pending[cid]).toBe(action);  // gesture disabled
      await session.waitFor(v => !(cid in v.pending));
    }
    const after = await session.waitFor(v =>
      (v.controller?.locks_in_emergency ?? []).includes("south"));
    expect(after.controller!.barrier_in_emergency).toBe(true);
    expect(after.controller!.entering_light_set["north/upstream"]).toBe("redred");
    const html = render(after);
    expect(html).toContain("EMERGENCY");
    expect(html).toContain("redred");
    expect(after.trace.length).toBeGreaterThan(10);
    session.close();
  }, 20000);

  it("shows a stuck-green light diverging from its red set-point", async () => {
    const session = new ConsoleSession(service.url, wsFactory);
    await session.waitFor(v => v.connection === "ready" && !!v.controller);
    const cid = session.toggleFault(
      "stuck_aspect(green) leaving_light(north,upstream,east)", true);
    await session.waitFor(v => !(cid in v.pending));
    session.requestSnapshot();
    const view = await session.waitFor(v =>
      v.plant?.aspects["leaving_light:north/upstream/east"] === "green");
    expect(view.controller!.leaving_light_set["north/upstream"]).toBe("red");
    const html = render(view);
    expect(html).toContain("divergence-flag");
    session.close();
  }, 20000);

  it("rejects a protocol version mismatch with a blocking banner", async () => {
    const ws = new WebSocket(service.url);
    await new Promise<void>(resolve => ws.on("open", () => resolve()));
    ws.send(JSON.stringify({ kind: "hello", v: 99, cid: 1 }));
    const reply = await new Promise<any>(resolve =>
      ws.on("message", data => resolve(JSON.parse(String(data)))));
    expect(reply.kind).toBe("error");
    expect(reply.message).toContain("version");
    ws.close();
  }, 20000);
});

describe("console against a mutated server build", () => {
  let service: { proc: ChildProcess; url: string };

  beforeAll(async () => {
    service = await startService(["--mutate", "drop_water_guard"]);
  }, 20000);

  afterAll(() => {
    service?.proc.kill();
  });

  it("streams the violation and displays its verbatim title", async () => {
    const session = new ConsoleSession(service.url, wsFactory);
    await session.waitFor(v => v.connection === "ready" && !!v.controller);
    session.dispatch("GateCommand(north,upstream,command_open)");
    const view = await session.waitFor(v => v.violations.length > 0);
    expect(view.violations[0].id).toBe("safreq5");
    expect(view.violations[0].title)
      .toBe("Gates can only open if the waterlevel is equal");
    const html = render(view);
    expect(html).toContain("Gates can only open if the waterlevel is equal");
    session.close();
  }, 20000);
});
