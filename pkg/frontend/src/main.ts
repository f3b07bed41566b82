/** Browser entry: one rendering loop; network events and clicks feed it. */

import { ConsoleSession } from "./session.js";
import { render } from "./render.js";

const params = new URLSearchParams(location.search);
const endpoint = params.get("ws")
  ?? `ws://${location.hostname}:${params.get("port") ?? "8765"}`;

const root = document.getElementById("app")!;
const session = new ConsoleSession(endpoint);

session.onChange(view => {
  root.innerHTML = render(view);
});

root.addEventListener("click", event => {
  const el = (event.target as HTMLElement).closest(
    "[data-action],[data-fault],[data-tick],[data-auto]") as HTMLElement | null;
  if (!el || (el as HTMLButtonElement).disabled) return;
  if (el.dataset.action) {
    session.dispatch(el.dataset.action);
  } else if (el.dataset.fault) {
    session.toggleFault(el.dataset.fault, el.dataset.on === "true");
  } else if (el.dataset.tick) {
    session.ticks(parseInt(el.dataset.tick, 10));
  } else if (el.dataset.auto !== undefined) {
    const ms = parseInt(el.dataset.auto!, 10);
    session.autoTicks(ms > 0 ? ms : null);
  }
});
