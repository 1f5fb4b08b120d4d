/**
 * HTTP client for the mmkit service. One method per documented route,
 * no private endpoints, no client-side model mutation: every change the
 * UI makes flows through here.
 */

import { EventStreamParser } from "./events.js";
import type {
  BusInfo,
  EntityLabel,
  DescribeRow,
  ErrorBody,
  ModelSummary,
  ServerEvent,
  TagInfo,
  ToolKind,
  ToolMode,
  ToolState,
} from "./protocol.js";

/** A non-2xx service response, carrying the documented error code. */
export class ServiceFault extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
  ) {
    super(`${code}: ${detail}`);
    this.name = "ServiceFault";
  }
}

export class ServiceClient {
  constructor(readonly base: string = "") {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await response.json()) as T | ErrorBody;
    if (!response.ok) {
      const fault = payload as ErrorBody;
      throw new ServiceFault(
        response.status,
        fault.error ?? "unknown",
        fault.detail ?? "",
      );
    }
    return payload as T;
  }

  // -- models ----------------------------------------------------------------

  listModels(): Promise<{ models: ModelSummary[] }> {
    return this.request("GET", "/models");
  }

  loadModel(
    document: unknown,
    name?: string,
  ): Promise<{ model: ModelSummary }> {
    return this.request("POST", "/models", { name, document });
  }

  getSession(): Promise<{
    activeModel: string | null;
    buses: string[];
    tools: string[];
  }> {
    return this.request("GET", "/session");
  }

  setActiveModel(name: string): Promise<{ activeModel: string }> {
    return this.request("POST", "/session/model", { name });
  }

  listEntities(
    model: string,
    filter?: { type?: string; limit?: number },
  ): Promise<{ entities: EntityLabel[]; tags: TagInfo[] }> {
    const params = new URLSearchParams();
    if (filter?.type) params.set("type", filter.type);
    if (filter?.limit) params.set("limit", String(filter.limit));
    const suffix = params.toString() ? `?${params}` : "";
    return this.request("GET", `/models/${model}/entities${suffix}`);
  }

  describeEntity(
    model: string,
    id: number,
  ): Promise<{ entity: EntityLabel; rows: DescribeRow[] }> {
    return this.request("GET", `/models/${model}/entities/${id}`);
  }

  queryModel(
    model: string,
    pipeline: string,
  ): Promise<{ items: EntityLabel[] }> {
    return this.request("POST", `/models/${model}/query`, { pipeline });
  }

  exportModel(model: string): Promise<{ document: unknown }> {
    return this.request("GET", `/models/${model}/export`);
  }

  // -- buses -------------------------------------------------------------------

  listBuses(): Promise<{ buses: BusInfo[] }> {
    return this.request("GET", "/buses");
  }

  createBus(id?: string): Promise<{ bus: BusInfo }> {
    return this.request("POST", "/buses", id ? { id } : {});
  }

  // -- tools -------------------------------------------------------------------

  listTools(): Promise<{ tools: ToolState[] }> {
    return this.request("GET", "/tools");
  }

  openTool(
    kind: ToolKind,
    buses: string[],
    options?: { id?: string; bridge?: boolean },
  ): Promise<{ tool: ToolState }> {
    return this.request("POST", "/tools", {
      kind,
      buses,
      id: options?.id,
      bridge: options?.bridge,
    });
  }

  getTool(id: string): Promise<{ tool: ToolState }> {
    return this.request("GET", `/tools/${id}`);
  }

  setMode(id: string, mode: ToolMode): Promise<{ tool: ToolState }> {
    return this.request("POST", `/tools/${id}/mode`, { mode });
  }

  attach(id: string, bus: string): Promise<{ tool: ToolState }> {
    return this.request("POST", `/tools/${id}/attach`, { bus });
  }

  detach(id: string, bus: string): Promise<{ tool: ToolState }> {
    return this.request("POST", `/tools/${id}/detach`, { bus });
  }

  select(id: string, entities: number[]): Promise<{ published: number }> {
    return this.request("POST", `/tools/${id}/select`, { entities });
  }

  runPipeline(
    id: string,
    pipeline: string,
  ): Promise<{ items: EntityLabel[] }> {
    return this.request("POST", `/tools/${id}/run`, { pipeline });
  }

  replay(id: string, index: number): Promise<{ published: number }> {
    return this.request("POST", `/tools/${id}/replay`, { index });
  }

  exportLogger(
    id: string,
    format: "txt" | "csv",
  ): Promise<{ format: string; content: string }> {
    return this.request("GET", `/tools/${id}/export?format=${format}`);
  }

  setMinTokens(id: string, minTokens: number): Promise<{ tool: ToolState }> {
    return this.request("POST", `/tools/${id}/min-tokens`, { minTokens });
  }

  // -- event stream -----------------------------------------------------------

  /**
   * Consume /events until the signal aborts or the server closes.
   * Browsers normally use EventSource instead; this covers hosts without it.
   */
  async subscribeEvents(
    onEvent: (event: ServerEvent) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    const response = await fetch(this.base + "/events", {
      headers: { Accept: "text/event-stream" },
      signal,
    });
    if (!response.ok || response.body === null) {
      throw new ServiceFault(response.status, "events", "stream unavailable");
    }
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    const parser = new EventStreamParser();
    for (;;) {
      const { done, value } = await reader.read();
      if (done) {
        return;
      }
      for (const event of parser.push(decoder.decode(value, { stream: true }))) {
        onEvent(event);
      }
    }
  }
}
