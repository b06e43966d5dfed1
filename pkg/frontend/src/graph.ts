/** Force-directed SVG rendering of a network view model. */

import * as d3 from "d3";

import { snapCoord, type Position } from "./state";
import type { GraphLink, GraphNode, GraphViewModel } from "./viewmodel";

export interface GraphCallbacks {
  onVertexClick?: (node: GraphNode) => void;
  onPositionsPinned?: (positions: Record<number, Position>) => void;
}

interface SimNode extends GraphNode, d3.SimulationNodeDatum {}

type SimLink = d3.SimulationLinkDatum<SimNode> & GraphLink;

export function renderGraph(
  svgElement: SVGSVGElement,
  model: GraphViewModel,
  callbacks: GraphCallbacks = {},
): void {
  const svg = d3.select(svgElement);
  svg.selectAll("*").remove();
  const width = svgElement.clientWidth || 900;
  const height = svgElement.clientHeight || 600;

  if (model.empty) {
    svg
      .append("text")
      .attr("x", width / 2)
      .attr("y", height / 2)
      .attr("text-anchor", "middle")
      .attr("class", "notice")
      .text("no data");
    return;
  }

  const nodes: SimNode[] = model.nodes.map((n) => ({ ...n }));
  const links: SimLink[] = model.links.map((l) => ({ ...l }));

  const simulation = d3
    .forceSimulation(nodes)
    .force(
      "link",
      d3
        .forceLink<SimNode, SimLink>(links)
        .id((d) => d.key)
        .distance(80),
    )
    .force("charge", d3.forceManyBody().strength(-220))
    .force("center", d3.forceCenter(width / 2, height / 2))
    .force("collide", d3.forceCollide(24));

  const linkGroup = svg.append("g").attr("class", "links");
  const line = linkGroup
    .selectAll("line")
    .data(links)
    .join("line")
    .attr("stroke", "#9aa1a9")
    .attr("stroke-width", (d) => Math.min(1 + Math.log1p(d.weight), 5));
  const edgeLabel = linkGroup
    .selectAll("text")
    .data(links)
    .join("text")
    .attr("class", "edge-label")
    .text((d) => d.etype);

  const nodeGroup = svg
    .append("g")
    .attr("class", "nodes")
    .selectAll<SVGGElement, SimNode>("g")
    .data(nodes)
    .join("g")
    .attr("class", "node")
    .call(
      d3
        .drag<SVGGElement, SimNode>()
        .on("start", (event, d) => {
          if (!event.active) simulation.alphaTarget(0.3).restart();
          d.fx = d.x;
          d.fy = d.y;
        })
        .on("drag", (event, d) => {
          d.fx = event.x;
          d.fy = event.y;
        })
        .on("end", (event, d) => {
          if (!event.active) simulation.alphaTarget(0);
          d.fx = snapCoord(event.x);
          d.fy = snapCoord(event.y);
          if (callbacks.onPositionsPinned) {
            const pinned: Record<number, Position> = {};
            for (const n of nodes) {
              if (n.fx != null && n.fy != null) {
                pinned[n.key] = { x: snapCoord(n.fx), y: snapCoord(n.fy) };
              }
            }
            callbacks.onPositionsPinned(pinned);
          }
        }),
    );

  nodeGroup
    .append("circle")
    .attr("r", (d) => 8 + 6 * d.weight)
    .attr("fill", (d) => d.color)
    .on("click", (_event, d) => callbacks.onVertexClick?.(d));
  nodeGroup
    .append("title")
    .text((d) => `${d.name} [${d.vtype}] weight=${d.weight}\n`
      + JSON.stringify(d.info, null, 1));
  nodeGroup
    .append("text")
    .attr("class", "node-label")
    .attr("dy", -14)
    .attr("text-anchor", "middle")
    .text((d) => d.name);

  simulation.on("tick", () => {
    line
      .attr("x1", (d) => (d.source as SimNode).x ?? 0)
      .attr("y1", (d) => (d.source as SimNode).y ?? 0)
      .attr("x2", (d) => (d.target as SimNode).x ?? 0)
      .attr("y2", (d) => (d.target as SimNode).y ?? 0);
    edgeLabel
      .attr("x", (d) => (((d.source as SimNode).x ?? 0) + ((d.target as SimNode).x ?? 0)) / 2)
      .attr("y", (d) => (((d.source as SimNode).y ?? 0) + ((d.target as SimNode).y ?? 0)) / 2);
    nodeGroup.attr("transform", (d) => `translate(${d.x ?? 0},${d.y ?? 0})`);
  });
}

export function renderLegend(container: HTMLElement,
                             colors: Record<string, string>): void {
  container.innerHTML = "";
  for (const [vtype, color] of Object.entries(colors)) {
    const item = document.createElement("span");
    item.className = "legend-item";
    const swatch = document.createElement("span");
    swatch.className = "legend-swatch";
    swatch.style.backgroundColor = color;
    item.append(swatch, document.createTextNode(vtype));
    container.append(item);
  }
}
