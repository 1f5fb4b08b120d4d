/**
 * Wire types for the mmkit service, mirroring PROTOCOL.md.
 *
 * Nothing here is invented client-side: every shape is what the service
 * serializes. Entity labels carry an empty name for nameless types, and
 * ids the active model cannot resolve come back as type "?".
 */

export type ToolKind =
  | "query"
  | "inspector"
  | "dependency-graph"
  | "duplication"
  | "source"
  | "logger";

export type ToolMode = "following" | "frozen" | "highlighting";

export const TOOL_KINDS: readonly ToolKind[] = [
  "query",
  "inspector",
  "dependency-graph",
  "duplication",
  "source",
  "logger",
];

/** Denormalized entity reference as carried on buses and in results. */
export interface EntityLabel {
  id: number;
  type: string;
  name: string;
}

export interface ModelSummary {
  name: string;
  metamodel: string;
  entities: number;
  links: number;
  tags: number;
}

export interface TagInfo {
  id: number;
  name: string;
  color: string;
  members: number[];
}

export interface BusInfo {
  id: string;
  attached: string[];
  messages: number;
}

/** One inspector row; link values are entity id lists, absent values null. */
export interface DescribeRow {
  slot: string;
  kind: string;
  value: string | number | boolean | number[] | null;
}

export interface GraphEdge {
  source: number;
  target: number;
  kind: string;
}

export interface FragmentOccurrence {
  entity: number;
  file: string;
  startToken: number;
  endToken: number;
  start: number;
  end: number;
}

export interface Fragment {
  id: string;
  color: string;
  tokens: number;
  text: string;
  occurrences: FragmentOccurrence[];
}

export interface SourceView {
  entity: number;
  file: string;
  start: number;
  end: number;
  text: string;
}

export interface LogGroup {
  index: number;
  timestamp: number;
  bus: string;
  producer: string;
  entities: number[];
}

export interface QueryPayload {
  pipeline: string | null;
  result: number[];
}

export interface InspectorPayload {
  rows: DescribeRow[];
}

export interface GraphPayload {
  nodes: EntityLabel[];
  edges: GraphEdge[];
}

export interface DuplicationPayload {
  minTokens: number;
  fragments: Fragment[];
  skipped: number[];
}

export interface SourcePayload {
  view: SourceView | null;
}

export interface LoggerPayload {
  groups: LogGroup[];
}

export type ToolPayload =
  | QueryPayload
  | InspectorPayload
  | GraphPayload
  | DuplicationPayload
  | SourcePayload
  | LoggerPayload;

/** Full tool snapshot, served by tool routes and toolState events alike. */
export interface ToolState {
  id: string;
  kind: ToolKind;
  mode: ToolMode;
  bridge: boolean;
  buses: string[];
  currentEntities: EntityLabel[];
  highlighted: number[];
  payload: ToolPayload;
}

/** One bus publication as seen on the event stream. */
export interface BusMessageEvent {
  event: "message";
  bus: string;
  messageId: number;
  lineage: number;
  producer: string;
  timestamp: number;
  entities: EntityLabel[];
}

export interface ToolStateEvent extends ToolState {
  event: "toolState";
}

export type ServerEvent = BusMessageEvent | ToolStateEvent;

/** Error body for every non-2xx response. */
export interface ErrorBody {
  error: string;
  detail: string;
}
