/** Explorer shell: URL-driven view state, controls for the four analyses,
 * and rendering. Every displayed graph comes straight from a service
 * response. */

import { ApiClient, ApiError } from "./api";
import {
  defaultState,
  stateFromQuery,
  stateToQuery,
  type Position,
  type ViewState,
} from "./state";
import { renderGraph, renderLegend } from "./graph";
import { renderTimeline } from "./timeline";
import {
  TYPE_COLORS,
  buildGraphViewModel,
  computeTimeline,
} from "./viewmodel";
import type { EventNode, NetworkJson } from "./types";

const VERTEX_TYPES = ["PER", "ORG", "LOC", "TIME"];
const EDGE_TYPES = ["PER-SOC", "GEN-AFF", "ORG-AFF", "PART-WHOLE", "PHYS",
                    "CO-OCCUR"];

const api = new ApiClient("");
let state: ViewState = defaultState();
let currentNetwork: NetworkJson | null = null;
let requestSeq = 0;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function showError(message: string): void {
  const banner = el<HTMLDivElement>("error-banner");
  banner.textContent = message;
  banner.hidden = false;
}

function clearError(): void {
  el<HTMLDivElement>("error-banner").hidden = true;
}

function syncUrl(): void {
  const query = stateToQuery(state);
  history.replaceState(null, "", query ? `?${query}` : location.pathname);
}

/** Latest-wins: only the newest request may update the view. */
async function runExclusive<T>(work: () => Promise<T>): Promise<T | null> {
  const seq = ++requestSeq;
  const result = await work();
  return seq === requestSeq ? result : null;
}

function renderNetworkView(net: NetworkJson): void {
  currentNetwork = net;
  state.mode = "network";
  el<HTMLDivElement>("timeline").hidden = true;
  const svg = el<HTMLElement>("graph") as unknown as SVGSVGElement;
  (svg as unknown as HTMLElement).hidden = false;
  const model = buildGraphViewModel(net, state.positions);
  renderGraph(svg, model, {
    onVertexClick: (node) => {
      state.center = node.name;
      void egoView();
    },
    onPositionsPinned: (positions: Record<number, Position>) => {
      state.positions = positions;
      syncUrl();
    },
  });
  el<HTMLSpanElement>("view-info").textContent =
    `${net.event_id}: ${net.vertices.length} vertices, ${net.edges.length} edges`;
  syncUrl();
}

function renderPltView(net: NetworkJson, person: string): void {
  currentNetwork = net;
  state.mode = "plt";
  (el<HTMLElement>("graph") as unknown as HTMLElement).hidden = true;
  const timeline = el<HTMLDivElement>("timeline");
  timeline.hidden = false;
  renderTimeline(timeline, computeTimeline(net), person);
  el<HTMLSpanElement>("view-info").textContent =
    `PLT ${person}: ${net.vertices.length} vertices, ${net.edges.length} edges`;
  syncUrl();
}

async function guard(work: () => Promise<void>): Promise<void> {
  clearError();
  try {
    await work();
  } catch (err) {
    // stale view stays put; only the banner changes
    if (err instanceof ApiError) {
      showError(`${err.code}: ${err.message}`);
    } else {
      showError(String(err));
    }
  }
}

async function loadSlices(): Promise<void> {
  const slices = await api.slices();
  const select = el<HTMLSelectElement>("slice-select");
  select.innerHTML = "";
  for (const slice of slices) {
    const option = document.createElement("option");
    option.value = String(slice.index);
    option.textContent =
      `t${slice.index} (${slice.start.slice(0, 10)} – ${slice.end.slice(0, 10)},`
      + ` ${slice.documents} docs)`;
    select.append(option);
  }
  if (state.slice === null && slices.length) state.slice = slices[0].index;
  if (state.slice !== null) select.value = String(state.slice);
}

function fillEventSelect(events: EventNode[]): void {
  const select = el<HTMLSelectElement>("event-select");
  select.innerHTML = "";
  const add = (event: EventNode, depth: number) => {
    const option = document.createElement("option");
    option.value = event.id;
    const words = event.top_words.slice(0, 3).map((w) => w.word).join(" ");
    option.textContent =
      `${" ".repeat(depth * 2)}${event.id} [${event.members.length}] ${words}`;
    select.append(option);
    event.children.forEach((child) => add(child, depth + 1));
  };
  events.forEach((event) => add(event, 0));
  if (state.event) select.value = state.event;
  if (!select.value && select.options.length) {
    select.selectedIndex = 0;
    state.event = select.value;
  }
}

async function loadEvents(): Promise<void> {
  if (state.slice === null) return;
  const events = await api.sliceEvents(state.slice);
  fillEventSelect(events);
}

async function networkView(): Promise<void> {
  if (!state.event) return;
  const filtersActive =
    state.vtypes.length > 0 || state.etypes.length > 0 || state.minWeight !== null;
  const net = await runExclusive(() =>
    filtersActive
      ? api.analyzeFilter(state.event!, {
          vtypes: state.vtypes,
          etypes: state.etypes,
          minWeight: state.minWeight,
        })
      : api.network(state.event!),
  );
  if (net) renderNetworkView(net);
}

async function egoView(): Promise<void> {
  if (!state.event || !state.center) return;
  const net = await runExclusive(() =>
    api.analyzeEgo(state.event!, state.center!, state.radius));
  if (net) renderNetworkView(net);
}

async function pltView(): Promise<void> {
  if (!state.event || !state.person) return;
  const person = state.person;
  const net = await runExclusive(() => api.analyzePlt(state.event!, person));
  if (net) renderPltView(net, person);
}

async function actionView(): Promise<void> {
  if (!state.event) return;
  const net = await runExclusive(() =>
    api.analyzeAction(state.event!, {
      threshold: state.actionThreshold,
      minCooccur: state.minCooccur,
    }));
  if (net) renderNetworkView(net);
}

async function pathView(from: string, to: string): Promise<void> {
  if (!state.event) return;
  const net = await runExclusive(() => api.analyzePath(state.event!, from, to));
  if (net) renderNetworkView(net);
}

function readFilterControls(): void {
  state.vtypes = VERTEX_TYPES.filter(
    (t) => el<HTMLInputElement>(`vtype-${t}`).checked);
  state.etypes = EDGE_TYPES.filter(
    (t) => el<HTMLInputElement>(`etype-${t}`).checked);
  const slider = el<HTMLInputElement>("weight-slider");
  state.minWeight = slider.value === "0" ? null : Number(slider.value);
}

function writeControls(): void {
  for (const t of VERTEX_TYPES) {
    el<HTMLInputElement>(`vtype-${t}`).checked = state.vtypes.includes(t);
  }
  for (const t of EDGE_TYPES) {
    el<HTMLInputElement>(`etype-${t}`).checked = state.etypes.includes(t);
  }
  el<HTMLInputElement>("weight-slider").value = String(state.minWeight ?? 0);
  el<HTMLInputElement>("center-input").value = state.center ?? "";
  el<HTMLInputElement>("radius-input").value = String(state.radius);
  el<HTMLInputElement>("person-input").value = state.person ?? "";
  el<HTMLInputElement>("athr-input").value =
    state.actionThreshold === null ? "" : String(state.actionThreshold);
  el<HTMLInputElement>("cooc-input").value =
    state.minCooccur === null ? "" : String(state.minCooccur);
}

function wireControls(): void {
  el<HTMLSelectElement>("slice-select").addEventListener("change", (ev) => {
    state.slice = Number((ev.target as HTMLSelectElement).value);
    state.event = null;
    void guard(async () => {
      await loadEvents();
      await networkView();
    });
  });
  el<HTMLSelectElement>("event-select").addEventListener("change", (ev) => {
    state.event = (ev.target as HTMLSelectElement).value;
    state.positions = {};
    void guard(networkView);
  });
  el<HTMLButtonElement>("apply-filter").addEventListener("click", () => {
    readFilterControls();
    void guard(networkView);
  });
  el<HTMLButtonElement>("apply-ego").addEventListener("click", () => {
    state.center = el<HTMLInputElement>("center-input").value || null;
    state.radius = Number(el<HTMLInputElement>("radius-input").value) || 1;
    void guard(egoView);
  });
  el<HTMLButtonElement>("apply-plt").addEventListener("click", () => {
    state.person = el<HTMLInputElement>("person-input").value || null;
    void guard(pltView);
  });
  el<HTMLButtonElement>("apply-action").addEventListener("click", () => {
    const athr = el<HTMLInputElement>("athr-input").value;
    const cooc = el<HTMLInputElement>("cooc-input").value;
    state.actionThreshold = athr ? Number(athr) : null;
    state.minCooccur = cooc ? Number(cooc) : null;
    void guard(actionView);
  });
  el<HTMLButtonElement>("apply-path").addEventListener("click", () => {
    const from = el<HTMLInputElement>("path-from").value;
    const to = el<HTMLInputElement>("path-to").value;
    if (from && to) void guard(() => pathView(from, to));
  });
  el<HTMLButtonElement>("reset-view").addEventListener("click", () => {
    state.vtypes = [];
    state.etypes = [];
    state.minWeight = null;
    state.center = null;
    state.positions = {};
    writeControls();
    void guard(networkView);
  });
}

async function boot(): Promise<void> {
  state = stateFromQuery(location.search);
  renderLegend(el<HTMLDivElement>("legend"), TYPE_COLORS);
  wireControls();
  await guard(async () => {
    await loadSlices();
    await loadEvents();
    writeControls();
    if (state.mode === "plt" && state.person) {
      await pltView();
    } else if (state.center) {
      await egoView();
    } else {
      await networkView();
    }
  });
}

document.addEventListener("DOMContentLoaded", () => void boot());

export { currentNetwork };
