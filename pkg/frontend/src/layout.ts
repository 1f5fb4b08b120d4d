/**
 * Deterministic layered layout for the dependency graph panel.
 *
 * No forces, no randomness: layers come from longest-path relaxation over
 * the edges, positions from each node's rank within its layer, and every
 * tie breaks on entity id. The same graph always renders identically.
 */

import type { EntityLabel, GraphEdge } from "./protocol.js";

export interface PlacedNode extends EntityLabel {
  x: number;
  y: number;
  layer: number;
}

export interface Layout {
  nodes: PlacedNode[];
  edges: GraphEdge[];
  width: number;
  height: number;
}

export const COLUMN_GAP = 150;
export const ROW_GAP = 90;

export function layeredLayout(
  nodes: EntityLabel[],
  edges: GraphEdge[],
): Layout {
  const ordered = [...nodes].sort((a, b) => a.id - b.id);
  const layer = new Map<number, number>();
  for (const node of ordered) {
    layer.set(node.id, 0);
  }
  const orderedEdges = [...edges].sort(
    (a, b) =>
      a.source - b.source ||
      a.target - b.target ||
      a.kind.localeCompare(b.kind),
  );
  // Longest path from the roots; the pass cap keeps cycles from spinning
  // (a cycle's members settle wherever the cap catches them).
  const cap = Math.max(ordered.length, 1);
  for (let pass = 0; pass < cap; pass++) {
    let changed = false;
    for (const edge of orderedEdges) {
      if (edge.source === edge.target) {
        continue;
      }
      const from = layer.get(edge.source);
      const to = layer.get(edge.target);
      if (from === undefined || to === undefined) {
        continue;
      }
      if (to < from + 1 && from + 1 < cap) {
        layer.set(edge.target, from + 1);
        changed = true;
      }
    }
    if (!changed) {
      break;
    }
  }

  const byLayer = new Map<number, EntityLabel[]>();
  for (const node of ordered) {
    const depth = layer.get(node.id) ?? 0;
    const row = byLayer.get(depth);
    if (row) {
      row.push(node);
    } else {
      byLayer.set(depth, [node]);
    }
  }

  const placed: PlacedNode[] = [];
  let widestRow = 0;
  const depths = [...byLayer.keys()].sort((a, b) => a - b);
  depths.forEach((depth, rowIndex) => {
    const row = byLayer.get(depth)!;
    widestRow = Math.max(widestRow, row.length);
    row.forEach((node, column) => {
      placed.push({
        ...node,
        layer: depth,
        x: column * COLUMN_GAP + COLUMN_GAP / 2,
        y: rowIndex * ROW_GAP + ROW_GAP / 2,
      });
    });
  });
  placed.sort((a, b) => a.id - b.id);

  return {
    nodes: placed,
    edges: orderedEdges,
    width: Math.max(widestRow, 1) * COLUMN_GAP,
    height: Math.max(depths.length, 1) * ROW_GAP,
  };
}
