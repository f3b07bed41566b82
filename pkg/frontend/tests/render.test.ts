import { describe, expect, it } from "vitest";

import { render } from "../src/render.js";
import { ConsoleViewModel, applyMessage, initialView } from "../src/viewmodel.js";

function readyView(): ConsoleViewModel {
  let view = applyMessage(initialView(), {
    kind: "ack", cid: 1,
    info: {
      session: "s-9", protocol: 1,
      config: { locks: ["north", "south"], orientations: ["east", "west"],
                stream_sides: ["upstream", "downstream"], include_barrier: true },
      requirements: [],
    },
  });
  const pair = (v: string) => ({
    "north/upstream": v, "north/downstream": v,
    "south/upstream": v, "south/downstream": v,
  });
  const perLight = (v: string) => {
    const out: Record<string, string> = {};
    for (const l of ["north", "south"])
      for (const s of ["upstream", "downstream"])
        for (const o of ["east", "west"]) out[`${l}/${s}/${o}`] = v;
    return out;
  };
  const positions: Record<string, number> = { "barrier:-": 10 };
  const motions: Record<string, string> = { "barrier:-": "still" };
  const aspects: Record<string, string> = {};
  for (const l of ["north", "south"])
    for (const s of ["upstream", "downstream"])
      for (const o of ["east", "west"]) {
        positions[`gate:${l}/${s}/${o}`] = 0;
        positions[`paddle:${l}/${s}/${o}`] = 0;
        motions[`gate:${l}/${s}/${o}`] = "still";
        motions[`paddle:${l}/${s}/${o}`] = "still";
        aspects[`entering_light:${l}/${s}/${o}`] = "single_red";
        aspects[`leaving_light:${l}/${s}/${o}`] = "red";
      }
  for (const s of ["upstream", "downstream"])
    for (const o of ["east", "west"]) aspects[`barrier_light:${s}/${o}`] = "red";
  return applyMessage(view, {
    kind: "state_snapshot", seq: 0,
    controller: {
      barrier_status: "opened", barrier_in_emergency: false,
      barrier_light_set: { upstream: "red", downstream: "red" },
      gate_status: perLight("closed"), paddle_status: perLight("closed"),
      entering_light_set: pair("single_red"), leaving_light_set: pair("red"),
      water_equal: { "north/upstream": false, "north/downstream": false,
                     "south/upstream": false, "south/downstream": false },
      locks_in_emergency: [],
    },
    plant: { tick: 0, positions, motions, aspects, water: {}, faults: [],
             travel: 10 },
  });
}

describe("render", () => {
  it("initial view renders the full schematic with all-red lights", () => {
    const html = render(readyView());
    // 2 locks x 2 sides x 2 orientations x (entering + leaving) = 16 lock
    // lights plus 4 barrier lights, every one of them showing red
    const reds = html.match(/dot phys aspect-red/g) ?? [];
    expect(reds.length).toBe(20);
    expect(html).toContain("flood barrier (opened)");
    expect(html).toContain("lock north");
    expect(html).toContain("lock south");
    expect(html).not.toContain("divergence-flag");
  });

  it("every external command kind is reachable from the UI", () => {
    const html = render(readyView());
    for (const action of [
      "GateCommand(north,upstream,command_open)",
      "PaddleCommand(south,downstream,command_stop)",
      "EmergencyLockCommand(north,activate)",
      "EmergencyLockCommand(south,activate)",
      "BarrierCommand(command_close)",
      "EmergencyBarrierCommand(activate)",
      "EnteringTrafficLightCommand(north,upstream,redgreen)",
      "LeavingTrafficLightCommand(south,upstream,green)",
      "BarrierTrafficLightCommand(downstream,red)",
    ]) {
      expect(html).toContain(`data-action="${action}"`);
    }
    // the three emergency buttons
    expect((html.match(/emergency-btn/g) ?? []).length).toBe(3);
  });

  it("stuck green light renders a visible set/physical divergence", () => {
    const view = readyView();
    view.plant!.aspects["leaving_light:north/upstream/east"] = "green";
    const html = render(view);
    expect(html).toContain("divergence-flag");
    const cell = html.split(`data-light="leaving_light:north/upstream/east"`)[1]
      .split("</div>")[0];
    expect(cell).toContain("set aspect-red");
    expect(cell).toContain("phys aspect-green");
  });

  it("violations render the verbatim requirement title", () => {
    let view = readyView();
    view = applyMessage(view, {
      kind: "violation", id: "safreq5",
      title: "Gates can only open if the waterlevel is equal",
      seq: 12, detail: "l=north,s=upstream",
    });
    const html = render(view);
    expect(html).toContain("Gates can only open if the waterlevel is equal");
    expect(html).toContain('data-requirement="safreq5"');
  });

  it("emergency mode shows the banner", () => {
    const view = readyView();
    view.controller!.locks_in_emergency = ["north"];
    const html = render(view);
    expect(html).toContain("EMERGENCY");
  });

  it("version refusal renders a blocking banner", () => {
    const view = applyMessage(initialView(),
      { kind: "error", cid: 1, message: "protocol version mismatch; expected v=1" });
    const html = render(view);
    expect(html).toContain("banner error");
    expect(html).toContain("version mismatch");
  });
});
