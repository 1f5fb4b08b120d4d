import { describe, expect, it } from "vitest";

import type {
  BusMessageEvent,
  ToolState,
  ToolStateEvent,
} from "../src/protocol.js";
import {
  effectiveMode,
  initialState,
  reduce,
  type Action,
  type AppState,
} from "../src/store.js";

function tool(id: string, overrides: Partial<ToolState> = {}): ToolState {
  return {
    id,
    kind: "query",
    mode: "following",
    bridge: false,
    buses: ["left"],
    currentEntities: [],
    highlighted: [],
    payload: { pipeline: null, result: [] },
    ...overrides,
  };
}

function messageOn(bus: string, producer = "q1"): BusMessageEvent {
  return {
    event: "message",
    bus,
    messageId: 1,
    lineage: 1,
    producer,
    timestamp: 1,
    entities: [{ id: 4, type: "Commit", name: "" }],
  };
}

function snapshotOf(state: ToolState): ToolStateEvent {
  return { event: "toolState", ...state };
}

function deepFreeze<T>(value: T): T {
  if (value && typeof value === "object" && !Object.isFrozen(value)) {
    Object.freeze(value);
    for (const child of Object.values(value as object)) {
      deepFreeze(child);
    }
  }
  return value;
}

function dispatchAll(state: AppState, actions: Action[]): AppState {
  return actions.reduce((acc, action) => reduce(deepFreeze(acc), action), state);
}

describe("panels", () => {
  it("open, update, close", () => {
    let state = reduce(initialState(), {
      type: "panelOpened",
      tool: tool("q1"),
    });
    expect(state.panels.q1.kind).toBe("query");

    state = reduce(state, {
      type: "serverEvent",
      event: snapshotOf(
        tool("q1", { currentEntities: [{ id: 2, type: "File", name: "main.c" }] }),
      ),
    });
    expect(state.panels.q1.currentEntities.map((e) => e.id)).toEqual([2]);

    state = reduce(state, { type: "panelClosed", toolId: "q1" });
    expect(state.panels.q1).toBeUndefined();
  });

  it("snapshots for unopened tools are ignored", () => {
    const state = reduce(initialState(), {
      type: "serverEvent",
      event: snapshotOf(tool("ghost")),
    });
    expect(Object.keys(state.panels)).toEqual([]);
  });

  it("never mutates its inputs", () => {
    const before = deepFreeze(
      reduce(initialState(), { type: "panelOpened", tool: tool("q1") }),
    );
    const after = reduce(before, {
      type: "serverEvent",
      event: messageOn("left", "other"),
    });
    expect(after).not.toBe(before);
    expect(before.panels.q1.stale).toBe(false);
  });
});

describe("mode toggles", () => {
  it("shows the requested mode optimistically, then reconciles", () => {
    let state = reduce(initialState(), { type: "panelOpened", tool: tool("g1") });
    state = reduce(state, {
      type: "modeChangeRequested",
      toolId: "g1",
      mode: "frozen",
    });
    expect(state.panels.g1.mode).toBe("following");
    expect(effectiveMode(state.panels.g1)).toBe("frozen");

    state = reduce(state, {
      type: "toolFetched",
      tool: tool("g1", { mode: "frozen" }),
    });
    expect(state.panels.g1.mode).toBe("frozen");
    expect(state.panels.g1.pendingMode).toBeNull();
  });
});

describe("sync indicator", () => {
  it("marks listeners stale on a message and clears on their snapshot", () => {
    let state = dispatchAll(initialState(), [
      { type: "panelOpened", tool: tool("q1") },
      { type: "panelOpened", tool: tool("g1", { kind: "dependency-graph" }) },
    ]);
    state = reduce(state, { type: "serverEvent", event: messageOn("left", "q1") });
    expect(state.panels.q1.stale).toBe(false);
    expect(state.panels.g1.stale).toBe(true);

    state = reduce(state, {
      type: "serverEvent",
      event: snapshotOf(tool("g1", { kind: "dependency-graph" })),
    });
    expect(state.panels.g1.stale).toBe(false);
  });

  it("frozen panels and other buses are left alone", () => {
    let state = dispatchAll(initialState(), [
      { type: "panelOpened", tool: tool("g1", { mode: "frozen" }) },
      { type: "panelOpened", tool: tool("g2", { buses: ["right"] }) },
    ]);
    state = reduce(state, { type: "serverEvent", event: messageOn("left", "q1") });
    expect(state.panels.g1.stale).toBe(false);
    expect(state.panels.g2.stale).toBe(false);
  });
});

describe("buses and traffic", () => {
  it("counts messages per known bus", () => {
    let state = reduce(initialState(), {
      type: "busCreated",
      bus: { id: "left", attached: [], messages: 0 },
    });
    state = reduce(state, { type: "serverEvent", event: messageOn("left") });
    state = reduce(state, { type: "serverEvent", event: messageOn("left") });
    state = reduce(state, { type: "serverEvent", event: messageOn("elsewhere") });
    expect(state.buses.left.messages).toBe(2);
    expect(state.traffic).toHaveLength(3);
  });

  it("listing replaces the whole bus table", () => {
    let state = reduce(initialState(), {
      type: "busCreated",
      bus: { id: "old", attached: [], messages: 0 },
    });
    state = reduce(state, {
      type: "busesListed",
      buses: [{ id: "left", attached: ["q1"], messages: 6 }],
    });
    expect(Object.keys(state.buses)).toEqual(["left"]);
  });
});

describe("notices", () => {
  it("posts and dismisses", () => {
    let state = reduce(initialState(), {
      type: "noticePosted",
      code: "bad-pipeline",
      detail: "bad stage 'sideways'",
    });
    expect(state.notices).toHaveLength(1);
    const id = state.notices[0].id;
    state = reduce(state, { type: "noticeDismissed", id });
    expect(state.notices).toHaveLength(0);
  });
});
