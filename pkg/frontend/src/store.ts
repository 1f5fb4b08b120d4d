/**
 * Client state as a pure function of the event stream plus local actions.
 *
 * reduce() never mutates its input, so replaying a recorded event log
 * reproduces the screen state exactly. The only optimism is pendingMode:
 * a requested mode shows immediately and reconciles on the next
 * authoritative tool snapshot (response or toolState event).
 */

import type {
  BusInfo,
  BusMessageEvent,
  EntityLabel,
  ServerEvent,
  ToolKind,
  ToolMode,
  ToolPayload,
  ToolState,
} from "./protocol.js";

const TRAFFIC_LIMIT = 500;
const NOTICE_LIMIT = 20;

export interface PanelState {
  toolId: string;
  kind: ToolKind;
  busIds: string[];
  mode: ToolMode;
  bridge: boolean;
  currentEntities: EntityLabel[];
  highlighted: number[];
  payload: ToolPayload;
  /** Requested but unconfirmed mode; render this over mode when set. */
  pendingMode: ToolMode | null;
  /** True between a bus message touching this panel and its next snapshot. */
  stale: boolean;
}

export interface Notice {
  id: number;
  code: string;
  detail: string;
}

export interface AppState {
  activeModel: string | null;
  buses: Record<string, BusInfo>;
  panels: Record<string, PanelState>;
  traffic: BusMessageEvent[];
  notices: Notice[];
  nextNoticeId: number;
}

export type Action =
  | { type: "serverEvent"; event: ServerEvent }
  | { type: "panelOpened"; tool: ToolState }
  | { type: "panelClosed"; toolId: string }
  | { type: "toolFetched"; tool: ToolState }
  | { type: "modeChangeRequested"; toolId: string; mode: ToolMode }
  | { type: "busCreated"; bus: BusInfo }
  | { type: "busesListed"; buses: BusInfo[] }
  | { type: "sessionLoaded"; activeModel: string | null }
  | { type: "noticePosted"; code: string; detail: string }
  | { type: "noticeDismissed"; id: number };

export function initialState(): AppState {
  return {
    activeModel: null,
    buses: {},
    panels: {},
    traffic: [],
    notices: [],
    nextNoticeId: 1,
  };
}

/** The mode to render: the optimistic request when one is in flight. */
export function effectiveMode(panel: PanelState): ToolMode {
  return panel.pendingMode ?? panel.mode;
}

function panelFromTool(tool: ToolState): PanelState {
  return {
    toolId: tool.id,
    kind: tool.kind,
    busIds: [...tool.buses],
    mode: tool.mode,
    bridge: tool.bridge,
    currentEntities: tool.currentEntities,
    highlighted: tool.highlighted,
    payload: tool.payload,
    pendingMode: null,
    stale: false,
  };
}

function withPanel(state: AppState, panel: PanelState): AppState {
  return { ...state, panels: { ...state.panels, [panel.toolId]: panel } };
}

function applyMessage(state: AppState, event: BusMessageEvent): AppState {
  const traffic = [...state.traffic, event].slice(-TRAFFIC_LIMIT);
  let buses = state.buses;
  const bus = buses[event.bus];
  if (bus) {
    buses = { ...buses, [event.bus]: { ...bus, messages: bus.messages + 1 } };
  }
  // Panels on this bus will get a toolState snapshot shortly; show them as
  // syncing meanwhile. The producer and frozen panels receive none.
  let panels = state.panels;
  for (const panel of Object.values(state.panels)) {
    if (
      !panel.busIds.includes(event.bus) ||
      panel.toolId === event.producer ||
      panel.mode === "frozen"
    ) {
      continue;
    }
    if (panels === state.panels) {
      panels = { ...state.panels };
    }
    panels[panel.toolId] = { ...panel, stale: true };
  }
  return { ...state, traffic, buses, panels };
}

function applyServerEvent(state: AppState, event: ServerEvent): AppState {
  if (event.event === "message") {
    return applyMessage(state, event);
  }
  // Snapshots for tools without an open panel are other clients' business.
  if (!state.panels[event.id]) {
    return state;
  }
  return withPanel(state, panelFromTool(event));
}

export function reduce(state: AppState, action: Action): AppState {
  switch (action.type) {
    case "serverEvent":
      return applyServerEvent(state, action.event);
    case "panelOpened":
      return withPanel(state, panelFromTool(action.tool));
    case "panelClosed": {
      const panels = { ...state.panels };
      delete panels[action.toolId];
      return { ...state, panels };
    }
    case "toolFetched": {
      if (!state.panels[action.tool.id]) {
        return state;
      }
      return withPanel(state, panelFromTool(action.tool));
    }
    case "modeChangeRequested": {
      const panel = state.panels[action.toolId];
      if (!panel) {
        return state;
      }
      return withPanel(state, { ...panel, pendingMode: action.mode });
    }
    case "busCreated":
      return {
        ...state,
        buses: { ...state.buses, [action.bus.id]: action.bus },
      };
    case "busesListed": {
      const buses: Record<string, BusInfo> = {};
      for (const bus of action.buses) {
        buses[bus.id] = bus;
      }
      return { ...state, buses };
    }
    case "sessionLoaded":
      return { ...state, activeModel: action.activeModel };
    case "noticePosted": {
      const notice: Notice = {
        id: state.nextNoticeId,
        code: action.code,
        detail: action.detail,
      };
      return {
        ...state,
        notices: [...state.notices, notice].slice(-NOTICE_LIMIT),
        nextNoticeId: state.nextNoticeId + 1,
      };
    }
    case "noticeDismissed":
      return {
        ...state,
        notices: state.notices.filter((n) => n.id !== action.id),
      };
  }
}
