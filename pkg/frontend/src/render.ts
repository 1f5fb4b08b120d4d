/**
 * Pure HTML rendering: state in, markup out.
 *
 * Panels share one shell (header with id, buses, mode buttons, sync dot);
 * the body comes from a per-kind renderer, so a new server tool kind only
 * needs an entry in RENDERERS. All interaction is declared through data-
 * attributes and handled by delegation in app.ts.
 */

import { layeredLayout } from "./layout.js";
import type {
  DuplicationPayload,
  EntityLabel,
  FragmentOccurrence,
  GraphPayload,
  InspectorPayload,
  LoggerPayload,
  QueryPayload,
  SourcePayload,
  ToolMode,
} from "./protocol.js";
import { effectiveMode, type AppState, type PanelState } from "./store.js";

const MODES: ToolMode[] = ["following", "frozen", "highlighting"];

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => {
    switch (ch) {
      case "&":
        return "&amp;";
      case "<":
        return "&lt;";
      case ">":
        return "&gt;";
      case '"':
        return "&quot;";
      default:
        return "&#39;";
    }
  });
}

function entityItem(label: EntityLabel, highlighted: number[]): string {
  const classes = highlighted.includes(label.id)
    ? "entity highlighted"
    : "entity";
  const name = label.name ? escapeHtml(label.name) : `#${label.id}`;
  return (
    `<li class="${classes}" data-entity="${label.id}">` +
    `<span class="etype">${escapeHtml(label.type)}</span> ` +
    `<span class="ename">${name}</span></li>`
  );
}

function entityList(panel: PanelState): string {
  if (panel.currentEntities.length === 0) {
    return `<p class="empty">nothing selected</p>`;
  }
  const items = panel.currentEntities
    .map((label) => entityItem(label, panel.highlighted))
    .join("");
  return `<ul class="entities">${items}</ul>`;
}

type Renderer = (panel: PanelState) => string;

function renderQuery(panel: PanelState): string {
  const payload = panel.payload as QueryPayload;
  const pipeline = payload.pipeline ?? "";
  // The panel's own result and the group it follows are different things:
  // published results go out to the bus, currentEntities is what came in.
  const result = payload.result.length
    ? `<p class="result">result: ` +
      payload.result
        .map((id) => `<span data-entity="${id}">#${id}</span>`)
        .join(", ") +
      `</p>`
    : "";
  return (
    `<form class="run" data-tool="${escapeHtml(panel.toolId)}">` +
    `<input name="pipeline" value="${escapeHtml(pipeline)}" ` +
    `placeholder="type:Class | outgoing Invocation | at-scope Package">` +
    `<button type="submit">run</button></form>` +
    result +
    entityList(panel)
  );
}

function renderInspector(panel: PanelState): string {
  const payload = panel.payload as InspectorPayload;
  if (payload.rows.length === 0) {
    return `<p class="empty">nothing to describe</p>`;
  }
  const rows = payload.rows
    .map((row) => {
      const value = Array.isArray(row.value)
        ? row.value.map((id) => `<span data-entity="${id}">#${id}</span>`).join(", ")
        : escapeHtml(String(row.value ?? ""));
      return (
        `<tr><td class="slot">${escapeHtml(row.slot)}</td>` +
        `<td class="kind">${escapeHtml(row.kind)}</td>` +
        `<td class="value">${value}</td></tr>`
      );
    })
    .join("");
  return `<table class="rows"><tbody>${rows}</tbody></table>`;
}

function renderGraph(panel: PanelState): string {
  const payload = panel.payload as GraphPayload;
  if (payload.nodes.length === 0) {
    return `<p class="empty">no dependencies to draw</p>`;
  }
  const layout = layeredLayout(payload.nodes, payload.edges);
  const place = new Map(layout.nodes.map((n) => [n.id, n]));
  const lines = layout.edges
    .map((edge) => {
      const from = place.get(edge.source);
      const to = place.get(edge.target);
      if (!from || !to) {
        return "";
      }
      return (
        `<line x1="${from.x}" y1="${from.y}" x2="${to.x}" y2="${to.y}" ` +
        `class="edge ${escapeHtml(edge.kind)}"><title>` +
        `${escapeHtml(edge.kind)}</title></line>`
      );
    })
    .join("");
  const circles = layout.nodes
    .map((node) => {
      const classes = panel.highlighted.includes(node.id)
        ? "node highlighted"
        : "node";
      const name = node.name ? escapeHtml(node.name) : `#${node.id}`;
      return (
        `<g class="${classes}" data-entity="${node.id}">` +
        `<circle cx="${node.x}" cy="${node.y}" r="18"><title>` +
        `${escapeHtml(node.type)}</title></circle>` +
        `<text x="${node.x}" y="${node.y + 32}" text-anchor="middle">` +
        `${name}</text></g>`
      );
    })
    .join("");
  return (
    `<svg class="graph" viewBox="0 0 ${layout.width} ${layout.height}" ` +
    `width="${layout.width}" height="${layout.height}">${lines}${circles}</svg>`
  );
}

function renderDuplication(panel: PanelState): string {
  const payload = panel.payload as DuplicationPayload;
  const controls =
    `<form class="min-tokens" data-tool="${escapeHtml(panel.toolId)}">` +
    `<label>min tokens <input name="minTokens" type="number" min="1" ` +
    `value="${payload.minTokens}"></label><button type="submit">apply</button></form>`;
  const byEntity = new Map<number, { color: string; occ: FragmentOccurrence }[]>();
  for (const fragment of payload.fragments) {
    for (const occ of fragment.occurrences) {
      const bucket = byEntity.get(occ.entity) ?? [];
      bucket.push({ color: fragment.color, occ });
      byEntity.set(occ.entity, bucket);
    }
  }
  const labels = new Map(panel.currentEntities.map((l) => [l.id, l]));
  const boxes = [...byEntity.keys()]
    .sort((a, b) => a - b)
    .map((entityId) => {
      const label = labels.get(entityId);
      const title = label?.name
        ? escapeHtml(label.name)
        : `#${entityId}`;
      const squares = byEntity
        .get(entityId)!
        .map(
          ({ color, occ }) =>
            `<span class="frag" style="background:${escapeHtml(color)}" ` +
            `title="tokens ${occ.startToken}..${occ.endToken}"></span>`,
        )
        .join("");
      return (
        `<div class="entity-box" data-entity="${entityId}">` +
        `<h4>${title}</h4><div class="frags">${squares}</div></div>`
      );
    })
    .join("");
  const skipped = payload.skipped.length
    ? `<p class="skipped">no source anchor: ` +
      payload.skipped.map((id) => `#${id}`).join(", ") +
      `</p>`
    : "";
  const body = boxes || `<p class="empty">no duplicated fragments</p>`;
  return controls + `<div class="boxes">${body}</div>` + skipped;
}

function renderSource(panel: PanelState): string {
  const payload = panel.payload as SourcePayload;
  if (!payload.view) {
    return `<p class="empty">select exactly one anchored entity</p>`;
  }
  const view = payload.view;
  return (
    `<h4>${escapeHtml(view.file)} [${view.start}..${view.end}]</h4>` +
    `<pre class="source">${escapeHtml(view.text)}</pre>`
  );
}

function renderLogger(panel: PanelState): string {
  const payload = panel.payload as LoggerPayload;
  if (payload.groups.length === 0) {
    return `<p class="empty">no recorded groups</p>`;
  }
  const items = payload.groups
    .map(
      (group) =>
        `<li><button data-replay="${group.index}" ` +
        `data-tool="${escapeHtml(panel.toolId)}">replay</button> ` +
        `<span class="when">t${group.timestamp}</span> ` +
        `<span class="who">${escapeHtml(group.producer)} on ${escapeHtml(group.bus)}</span> ` +
        `<span class="what">[${group.entities.join(", ")}]</span></li>`,
    )
    .join("");
  return `<ol class="groups">${items}</ol>`;
}

export const RENDERERS: Record<string, Renderer> = {
  query: renderQuery,
  inspector: renderInspector,
  "dependency-graph": renderGraph,
  duplication: renderDuplication,
  source: renderSource,
  logger: renderLogger,
};

export function renderPanel(panel: PanelState): string {
  const mode = effectiveMode(panel);
  const buttons = MODES.map(
    (m) =>
      `<button class="mode${m === mode ? " active" : ""}" ` +
      `data-mode="${m}" data-tool="${escapeHtml(panel.toolId)}">${m}</button>`,
  ).join("");
  const body = RENDERERS[panel.kind]?.(panel) ?? entityList(panel);
  return (
    `<section class="panel" data-tool="${escapeHtml(panel.toolId)}">` +
    `<header>` +
    `<span class="kind">${escapeHtml(panel.kind)}</span>` +
    `<strong>${escapeHtml(panel.toolId)}</strong>` +
    `<span class="buses">${panel.busIds.map(escapeHtml).join(", ")}</span>` +
    (panel.bridge ? `<span class="bridge">bridge</span>` : "") +
    (panel.stale ? `<span class="stale" title="waiting for sync">●</span>` : "") +
    `<span class="modes">${buttons}</span>` +
    `<button class="close" data-close="${escapeHtml(panel.toolId)}">×</button>` +
    `</header><div class="body">${body}</div></section>`
  );
}

export function renderPanels(state: AppState): string {
  return Object.values(state.panels).map(renderPanel).join("");
}

export function renderBuses(state: AppState): string {
  const rows = Object.values(state.buses)
    .map(
      (bus) =>
        `<li><strong>${escapeHtml(bus.id)}</strong> ` +
        `<span class="count">${bus.messages} messages</span> ` +
        `<span class="members">${bus.attached.map(escapeHtml).join(", ")}</span></li>`,
    )
    .join("");
  return rows ? `<ul class="buses">${rows}</ul>` : `<p class="empty">no buses</p>`;
}

export function renderNotices(state: AppState): string {
  return state.notices
    .map(
      (notice) =>
        `<div class="notice"><code>${escapeHtml(notice.code)}</code> ` +
        `${escapeHtml(notice.detail)} ` +
        `<button data-dismiss="${notice.id}">dismiss</button></div>`,
    )
    .join("");
}
