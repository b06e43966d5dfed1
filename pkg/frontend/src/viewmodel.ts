/** Pure view-model transforms: everything rendered is derived directly from
 * a service response (the explorer computes no analysis of its own). */

import type { NetworkJson, VertexFrame } from "./types";
import type { Position } from "./state";

/** Figure color conventions: persons red, organizations yellow, locations
 * blue, timestamps green. */
export const TYPE_COLORS: Record<string, string> = {
  PER: "#d03232",
  ORG: "#e0b93a",
  LOC: "#3572c6",
  TIME: "#3aa655",
};

export interface GraphNode {
  key: number;
  name: string;
  vtype: string;
  weight: number;
  info: Record<string, unknown>;
  color: string;
  x?: number;
  y?: number;
  fx?: number | null;
  fy?: number | null;
}

export interface GraphLink {
  source: number;
  target: number;
  etype: string;
  weight: number;
  info: Record<string, unknown>;
}

export interface GraphViewModel {
  eventId: string;
  nodes: GraphNode[];
  links: GraphLink[];
  empty: boolean;
}

export function buildGraphViewModel(
  net: NetworkJson,
  positions: Record<number, Position> = {},
): GraphViewModel {
  const nodes: GraphNode[] = net.vertices.map((v) => {
    const node: GraphNode = {
      key: v.key,
      name: v.name,
      vtype: v.vtype,
      weight: v.weight,
      info: v.info,
      color: TYPE_COLORS[v.vtype] ?? "#888888",
    };
    const pinned = positions[v.key];
    if (pinned) {
      node.x = pinned.x;
      node.y = pinned.y;
      node.fx = pinned.x;
      node.fy = pinned.y;
    }
    return node;
  });
  const links: GraphLink[] = net.edges.map((e) => ({
    source: e.v1,
    target: e.v2,
    etype: e.etype,
    weight: e.weight,
    info: e.info,
  }));
  return {
    eventId: net.event_id,
    nodes,
    links,
    empty: nodes.length === 0,
  };
}

export interface TimelineLocation {
  name: string;
  count: number; // PHYS mention occurrences at this time and place
  docIds: string[];
}

export interface TimelineTick {
  time: string; // ISO date, e.g. 2008-01-05
  locations: TimelineLocation[];
}

/** Time-ordered PLT track: one tick per TIME vertex (ascending), with the
 * locations it co-occurs with and their provenance documents. */
export function computeTimeline(net: NetworkJson): TimelineTick[] {
  const byKey = new Map<number, VertexFrame>();
  for (const v of net.vertices) byKey.set(v.key, v);
  const ticks = new Map<string, Map<string, TimelineLocation>>();
  for (const e of net.edges) {
    const a = byKey.get(e.v1);
    const b = byKey.get(e.v2);
    if (!a || !b) continue;
    let time: VertexFrame;
    let loc: VertexFrame;
    if (a.vtype === "TIME" && b.vtype === "LOC") {
      time = a;
      loc = b;
    } else if (b.vtype === "TIME" && a.vtype === "LOC") {
      time = b;
      loc = a;
    } else {
      continue;
    }
    let locations = ticks.get(time.name);
    if (!locations) {
      locations = new Map();
      ticks.set(time.name, locations);
    }
    let entry = locations.get(loc.name);
    if (!entry) {
      entry = { name: loc.name, count: 0, docIds: [] };
      locations.set(loc.name, entry);
    }
    entry.count += 1;
    const docId = e.info["doc_id"];
    if (typeof docId === "string" && !entry.docIds.includes(docId)) {
      entry.docIds.push(docId);
    }
  }
  return [...ticks.keys()].sort().map((time) => ({
    time,
    locations: [...ticks.get(time)!.values()].sort((a, b) =>
      a.name < b.name ? -1 : a.name > b.name ? 1 : 0,
    ),
  }));
}
