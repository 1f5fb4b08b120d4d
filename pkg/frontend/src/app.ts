/**
 * Browser bootstrap: wires the service client, the reducer, and the
 * renderers into the static page. Single event loop, events applied in
 * arrival order, full repaint per action (the panels are small).
 */

import { ServiceClient, ServiceFault } from "./client.js";
import { renderBuses, renderNotices, renderPanels } from "./render.js";
import {
  initialState,
  reduce,
  type Action,
  type AppState,
} from "./store.js";
import type { ServerEvent, ToolKind, ToolMode } from "./protocol.js";
import { TOOL_KINDS } from "./protocol.js";

const client = new ServiceClient("");
let state: AppState = initialState();

const panelsEl = document.getElementById("panels")!;
const busesEl = document.getElementById("buses")!;
const noticesEl = document.getElementById("notices")!;
const modelEl = document.getElementById("active-model")!;

function paint(): void {
  panelsEl.innerHTML = renderPanels(state);
  busesEl.innerHTML = renderBuses(state);
  noticesEl.innerHTML = renderNotices(state);
  modelEl.textContent = state.activeModel ?? "(no model)";
}

function dispatch(action: Action): void {
  state = reduce(state, action);
  paint();
}

/** Run one service call; faults become dismissable notices, not crashes. */
async function guarded<T>(work: Promise<T>): Promise<T | undefined> {
  try {
    return await work;
  } catch (error) {
    if (error instanceof ServiceFault) {
      dispatch({ type: "noticePosted", code: error.code, detail: error.detail });
    } else {
      dispatch({ type: "noticePosted", code: "network", detail: String(error) });
    }
    return undefined;
  }
}

async function refreshBuses(): Promise<void> {
  const listed = await guarded(client.listBuses());
  if (listed) {
    dispatch({ type: "busesListed", buses: listed.buses });
  }
}

// -- operations ---------------------------------------------------------------

async function openPanel(kind: ToolKind, busIds: string[]): Promise<void> {
  const opened = await guarded(client.openTool(kind, busIds));
  if (opened) {
    dispatch({ type: "panelOpened", tool: opened.tool });
    await refreshBuses();
  }
}

function closePanel(toolId: string): void {
  // The server tool keeps running; closing only drops the local panel.
  dispatch({ type: "panelClosed", toolId });
}

async function selectEntities(toolId: string, ids: number[]): Promise<void> {
  await guarded(client.select(toolId, ids));
  // The panel's own payload changes server-side without an event (the
  // producer is excluded from its buses), so sync it explicitly.
  const fetched = await guarded(client.getTool(toolId));
  if (fetched) {
    dispatch({ type: "toolFetched", tool: fetched.tool });
  }
}

async function setPanelMode(toolId: string, mode: ToolMode): Promise<void> {
  dispatch({ type: "modeChangeRequested", toolId, mode });
  const result = await guarded(client.setMode(toolId, mode));
  const tool = result ?? (await guarded(client.getTool(toolId)));
  if (tool) {
    dispatch({ type: "toolFetched", tool: tool.tool });
  }
}

async function runPipeline(toolId: string, pipeline: string): Promise<void> {
  const run = await guarded(client.runPipeline(toolId, pipeline));
  if (run) {
    const fetched = await guarded(client.getTool(toolId));
    if (fetched) {
      dispatch({ type: "toolFetched", tool: fetched.tool });
    }
  }
}

async function createBus(id: string): Promise<void> {
  const created = await guarded(client.createBus(id || undefined));
  if (created) {
    dispatch({ type: "busCreated", bus: created.bus });
  }
}

async function rewire(
  verb: "attach" | "detach",
  toolId: string,
  busId: string,
): Promise<void> {
  const call = verb === "attach" ? client.attach(toolId, busId) : client.detach(toolId, busId);
  const result = await guarded(call);
  if (result) {
    dispatch({ type: "toolFetched", tool: result.tool });
    await refreshBuses();
  }
}

// -- event delegation ----------------------------------------------------------

document.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  const entity = target.closest<HTMLElement>("[data-entity]");
  if (entity && !target.closest("form")) {
    const panel = entity.closest<HTMLElement>(".panel[data-tool]");
    if (panel) {
      void selectEntities(panel.dataset.tool!, [Number(entity.dataset.entity)]);
      return;
    }
  }
  if (target.matches("button[data-mode][data-tool]")) {
    void setPanelMode(
      target.dataset.tool!,
      target.dataset.mode as ToolMode,
    );
    return;
  }
  if (target.matches("button[data-replay][data-tool]")) {
    void guarded(client.replay(target.dataset.tool!, Number(target.dataset.replay)));
    return;
  }
  if (target.matches("button[data-close]")) {
    closePanel(target.dataset.close!);
    return;
  }
  if (target.matches("button[data-dismiss]")) {
    dispatch({ type: "noticeDismissed", id: Number(target.dataset.dismiss) });
  }
});

document.addEventListener("submit", (event) => {
  const form = event.target as HTMLFormElement;
  event.preventDefault();
  if (form.matches("form.run[data-tool]")) {
    const pipeline = (form.elements.namedItem("pipeline") as HTMLInputElement).value;
    void runPipeline(form.dataset.tool!, pipeline);
    return;
  }
  if (form.matches("form.min-tokens[data-tool]")) {
    const value = Number(
      (form.elements.namedItem("minTokens") as HTMLInputElement).value,
    );
    void guarded(client.setMinTokens(form.dataset.tool!, value)).then((result) => {
      if (result) {
        dispatch({ type: "toolFetched", tool: result.tool });
      }
    });
    return;
  }
  if (form.id === "open-panel") {
    const kind = (form.elements.namedItem("kind") as HTMLSelectElement).value;
    const buses = (form.elements.namedItem("buses") as HTMLInputElement).value
      .split(",")
      .map((part) => part.trim())
      .filter(Boolean);
    void openPanel(kind as ToolKind, buses);
    return;
  }
  if (form.id === "new-bus") {
    const id = (form.elements.namedItem("bus") as HTMLInputElement).value.trim();
    void createBus(id);
    form.reset();
    return;
  }
  if (form.id === "rewire") {
    const verb = (form.elements.namedItem("verb") as HTMLSelectElement).value;
    const toolId = (form.elements.namedItem("tool") as HTMLInputElement).value.trim();
    const busId = (form.elements.namedItem("bus") as HTMLInputElement).value.trim();
    if (toolId && busId) {
      void rewire(verb as "attach" | "detach", toolId, busId);
    }
  }
});

// -- startup --------------------------------------------------------------------

function populateKinds(): void {
  const select = document.querySelector<HTMLSelectElement>("#open-panel [name=kind]");
  if (select) {
    select.innerHTML = TOOL_KINDS.map(
      (kind) => `<option value="${kind}">${kind}</option>`,
    ).join("");
  }
}

async function start(): Promise<void> {
  populateKinds();
  const session = await guarded(client.getSession());
  if (session) {
    dispatch({ type: "sessionLoaded", activeModel: session.activeModel });
  }
  await refreshBuses();
  const tools = await guarded(client.listTools());
  if (tools) {
    for (const tool of tools.tools) {
      dispatch({ type: "panelOpened", tool });
    }
  }
  const source = new EventSource("/events");
  source.onmessage = (message) => {
    dispatch({
      type: "serverEvent",
      event: JSON.parse(message.data) as ServerEvent,
    });
  };
  paint();
}

void start();
