/** Render the view model to an HTML string: plant schematic, light aspects
 *  (set-point vs physical vs last-read), emergency banners, command panels,
 *  fault toggles, scrolling trace and the violation feed. */

import { ConsoleViewModel } from "./viewmodel.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function aspectClass(aspect: string | undefined): string {
  if (!aspect) return "aspect-unknown";
  if (aspect.includes("green")) return "aspect-green";
  return "aspect-red";
}

function lightCell(view: ConsoleViewModel, key: string, setPoint: string | undefined,
                   label: string): string {
  const physical = view.plant?.aspects[key];
  const read = view.lastRead[key] ?? "-";
  const divergent = setPoint && physical && setPoint !== physical;
  return `<div class="light ${divergent ? "divergent" : ""}" data-light="${esc(key)}">
    <span class="light-label">${esc(label)}</span>
    <span class="dot set ${aspectClass(setPoint)}" title="set-point">${esc(setPoint ?? "?")}</span>
    <span class="dot phys ${aspectClass(physical)}" title="physical">${esc(physical ?? "?")}</span>
    <span class="read" title="last read">${esc(read)}</span>
    ${divergent ? '<span class="divergence-flag">set/physical diverge</span>' : ""}
  </div>`;
}

function positionBar(view: ConsoleViewModel, key: string, label: string): string {
  const pos = view.plant?.positions[key];
  const travel = view.plant?.travel ?? 10;
  const motion = view.plant?.motions[key] ?? "?";
  const pct = pos === undefined ? 0 : Math.round((pos / travel) * 100);
  return `<div class="device" data-device="${esc(key)}">
    <span class="device-label">${esc(label)}</span>
    <span class="bar"><span class="fill" style="width:${pct}%"></span></span>
    <span class="pos">${pos ?? "?"}/${travel} ${esc(motion)}</span>
  </div>`;
}

function button(action: string, label: string, disabled: boolean,
                cls = ""): string {
  return `<button class="cmd ${cls}" data-action="${esc(action)}"` +
    `${disabled ? " disabled" : ""}>${esc(label)}</button>`;
}

function faultToggle(fault: string, label: string, active: boolean): string {
  return `<button class="fault ${active ? "active" : ""}" data-fault="${esc(fault)}"` +
    ` data-on="${active ? "false" : "true"}">${esc(label)}${active ? " ✱" : ""}</button>`;
}

function lockPanel(view: ConsoleViewModel, lock: string, busy: boolean): string {
  const cfg = view.info!.config;
  const ctl = view.controller;
  const emergency = ctl?.locks_in_emergency.includes(lock) ?? false;
  const sides = cfg.stream_sides.map(side => {
    const pair = `${lock}/${side}`;
    const devices = cfg.orientations.map(o => {
      const suffix = `${lock}/${side}/${o}`;
      return positionBar(view, `gate:${suffix}`, `gate ${o}`)
        + positionBar(view, `paddle:${suffix}`, `paddle ${o}`);
    }).join("");
    const lights = cfg.orientations.map(o => {
      const suffix = `${lock}/${side}/${o}`;
      return lightCell(view, `entering_light:${suffix}`,
                       ctl?.entering_light_set[pair], `entering ${o}`)
        + lightCell(view, `leaving_light:${suffix}`,
                    ctl?.leaving_light_set[pair], `leaving ${o}`);
    }).join("");
    const water = ctl?.water_equal[pair];
    const commands = [
      button(`GateCommand(${lock},${side},command_open)`, "open gates", busy),
      button(`GateCommand(${lock},${side},command_close)`, "close gates", busy),
      button(`GateCommand(${lock},${side},command_stop)`, "stop gates", busy),
      button(`PaddleCommand(${lock},${side},command_open)`, "open paddles", busy),
      button(`PaddleCommand(${lock},${side},command_close)`, "close paddles", busy),
      button(`PaddleCommand(${lock},${side},command_stop)`, "stop paddles", busy),
    ].join("");
    const lightCommands =
      ["single_red", "redred", "redgreen", "single_green"].map(c =>
        button(`EnteringTrafficLightCommand(${lock},${side},${c})`, `enter ${c}`, busy)
      ).join("")
      + ["red", "green"].map(c =>
        button(`LeavingTrafficLightCommand(${lock},${side},${c})`, `leave ${c}`, busy)
      ).join("");
    const faults = cfg.orientations.map(o => {
      const lightKey = `leaving_light(${lock},${side},${o})`;
      const active = view.plant?.faults.some(
        f => f.endsWith(lightKey) && f.startsWith("stuck_aspect(green)")) ?? false;
      return faultToggle(`stuck_aspect(green) ${lightKey}`, `stick leave ${o} green`, active)
        + faultToggle(`sensor_fail entering_light(${lock},${side},${o})`,
                      `fail enter ${o} sensor`,
                      view.plant?.faults.includes(
                        `sensor_fail entering_light(${lock},${side},${o})`) ?? false);
    }).join("")
      + faultToggle(`sensor_fail water(${lock},${side})`, "fail water sensor",
                    view.plant?.faults.includes(`sensor_fail water(${lock},${side})`) ?? false);
    return `<div class="side" data-side="${esc(pair)}">
      <h4>${esc(side)} <span class="water ${water ? "equal" : "unequal"}">water ${
        water ? "equal" : "unequal"}</span></h4>
      ${devices}${lights}
      <div class="commands">${commands}</div>
      <div class="commands">${lightCommands}</div>
      <div class="faults">${faults}</div>
    </div>`;
  }).join("");
  return `<section class="lock ${emergency ? "emergency" : ""}" data-lock="${esc(lock)}">
    <h3>lock ${esc(lock)}${emergency ? ' <span class="emergency-banner">EMERGENCY</span>' : ""}</h3>
    <div class="emergency-controls">
      ${button(`EmergencyLockCommand(${lock},activate)`, `EMERGENCY ${lock}`, busy, "emergency-btn")}
      ${button(`EmergencyLockCommand(${lock},deactivate)`, "clear emergency", busy)}
    </div>
    <div class="sides">${sides}</div>
  </section>`;
}

function barrierPanel(view: ConsoleViewModel, busy: boolean): string {
  const cfg = view.info!.config;
  if (!cfg.include_barrier) return "";
  const ctl = view.controller;
  const emergency = ctl?.barrier_in_emergency ?? false;
  const lights = cfg.stream_sides.map(side =>
    cfg.orientations.map(o =>
      lightCell(view, `barrier_light:${side}/${o}`,
                ctl?.barrier_light_set[side], `${side} ${o}`)).join("")).join("");
  const faults = cfg.stream_sides.map(side => cfg.orientations.map(o =>
    faultToggle(`stuck_aspect(green) barrier_light(${side},${o})`,
                `stick ${side} ${o} green`,
                view.plant?.faults.includes(
                  `stuck_aspect(green) barrier_light(${side},${o})`) ?? false)
  ).join("")).join("");
  return `<section class="barrier ${emergency ? "emergency" : ""}">
    <h3>flood barrier (${esc(ctl?.barrier_status ?? "?")})${
      emergency ? ' <span class="emergency-banner">EMERGENCY</span>' : ""}</h3>
    ${positionBar(view, "barrier:-", "barrier")}
    <div class="lights">${lights}</div>
    <div class="emergency-controls">
      ${button("EmergencyBarrierCommand(activate)", "EMERGENCY barrier", busy, "emergency-btn")}
      ${button("EmergencyBarrierCommand(deactivate)", "clear emergency", busy)}
    </div>
    <div class="commands">
      ${button("BarrierCommand(command_open)", "open barrier", busy)}
      ${button("BarrierCommand(command_close)", "close barrier", busy)}
      ${button("BarrierCommand(command_stop)", "stop barrier", busy)}
      ${cfg.stream_sides.map(s =>
        button(`BarrierTrafficLightCommand(${s},red)`, `${s} lights red`, busy)
        + button(`BarrierTrafficLightCommand(${s},green)`, `${s} lights green`, busy)
      ).join("")}
    </div>
    <div class="faults">${faults}</div>
  </section>`;
}

export function render(view: ConsoleViewModel): string {
  if (view.banner) {
    return `<div class="banner error">connection refused: ${esc(view.banner)}</div>`;
  }
  if (view.connection === "connecting") {
    return `<div class="banner">connecting…</div>`;
  }
  if (view.connection === "closed") {
    return `<div class="banner">connection closed — reload to retry</div>`;
  }
  const busy = Object.keys(view.pending).length > 0;
  const cfg = view.info!.config;
  const locks = cfg.locks.map(l => lockPanel(view, l, busy)).join("");
  const trace = view.trace.slice(-40).map(t =>
    `<div class="trace-line kind-${t.record_kind}">` +
    `<span class="seq">${t.seq}</span> <span class="rk">${t.record_kind}</span> ` +
    `${esc(t.action)}</div>`).join("");
  const violations = view.violations.map(v =>
    `<div class="violation" data-requirement="${esc(v.id)}">` +
    `<span class="vid">${esc(v.id)}</span> <span class="vtitle">${esc(v.title)}</span>` +
    ` <span class="vseq">@${v.seq}</span></div>`).join("");
  return `<div class="console">
    <header>
      <span class="session">session ${esc(view.session ?? "?")}</span>
      <span class="seq">seq ${view.seq}</span>
      <span class="tick">tick ${view.plant?.tick ?? 0}</span>
      ${view.lastError ? `<span class="last-error">${esc(view.lastError)}</span>` : ""}
      <button data-tick="1"${busy ? " disabled" : ""}>tick</button>
      <button data-tick="10"${busy ? " disabled" : ""}>tick ×10</button>
      <button data-auto="250"${busy ? " disabled" : ""}>auto</button>
      <button data-auto="0"${busy ? " disabled" : ""}>pause</button>
    </header>
    <main>
      <div class="plant">${locks}${barrierPanel(view, busy)}</div>
      <aside>
        <h3>violations (${view.violations.length})</h3>
        <div class="violations">${violations || '<div class="none">none</div>'}</div>
        <h3>trace</h3>
        <div class="trace">${trace}</div>
      </aside>
    </main>
  </div>`;
}
