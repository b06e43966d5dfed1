/** View state, losslessly serializable to the URL query string so any view
 * can be shared and reproduced. */

export type ViewMode = "network" | "plt";

export interface Position {
  x: number;
  y: number;
}

export interface ViewState {
  slice: number | null;
  event: string | null;
  mode: ViewMode;
  vtypes: string[]; // active vertex-type filters (empty = no constraint)
  etypes: string[];
  minWeight: number | null;
  center: string | null; // central figure for ego views
  radius: number;
  person: string | null; // PLT target person
  actionThreshold: number | null;
  minCooccur: number | null;
  positions: Record<number, Position>; // pinned layout, keyed by vertex key
}

export function defaultState(): ViewState {
  return {
    slice: null,
    event: null,
    mode: "network",
    vtypes: [],
    etypes: [],
    minWeight: null,
    center: null,
    radius: 1,
    person: null,
    actionThreshold: null,
    minCooccur: null,
    positions: {},
  };
}

/** Round a coordinate to the 0.1 grid used by the URL encoding; positions are
 * captured through this so the URL round-trip stays exact. */
export function snapCoord(value: number): number {
  return Math.round(value * 10) / 10;
}

function encodePositions(positions: Record<number, Position>): string {
  return Object.keys(positions)
    .map(Number)
    .sort((a, b) => a - b)
    .map((key) => `${key}:${positions[key].x},${positions[key].y}`)
    .join(";");
}

function decodePositions(text: string): Record<number, Position> {
  const positions: Record<number, Position> = {};
  for (const piece of text.split(";")) {
    if (!piece) continue;
    const [keyPart, coordPart] = piece.split(":");
    if (coordPart === undefined) continue;
    const [x, y] = coordPart.split(",").map(Number);
    const key = Number(keyPart);
    if (Number.isFinite(key) && Number.isFinite(x) && Number.isFinite(y)) {
      positions[key] = { x, y };
    }
  }
  return positions;
}

export function stateToQuery(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.slice !== null) params.set("slice", String(state.slice));
  if (state.event !== null) params.set("event", state.event);
  if (state.mode !== "network") params.set("mode", state.mode);
  for (const vtype of state.vtypes) params.append("vtype", vtype);
  for (const etype of state.etypes) params.append("etype", etype);
  if (state.minWeight !== null) params.set("minw", String(state.minWeight));
  if (state.center !== null) params.set("center", state.center);
  if (state.radius !== 1) params.set("radius", String(state.radius));
  if (state.person !== null) params.set("person", state.person);
  if (state.actionThreshold !== null) {
    params.set("athr", String(state.actionThreshold));
  }
  if (state.minCooccur !== null) params.set("cooc", String(state.minCooccur));
  const positions = encodePositions(state.positions);
  if (positions) params.set("pos", positions);
  return params.toString();
}

export function stateFromQuery(query: string): ViewState {
  const params = new URLSearchParams(query);
  const state = defaultState();
  if (params.has("slice")) state.slice = Number(params.get("slice"));
  if (params.has("event")) state.event = params.get("event");
  const mode = params.get("mode");
  if (mode === "plt") state.mode = "plt";
  state.vtypes = params.getAll("vtype");
  state.etypes = params.getAll("etype");
  if (params.has("minw")) state.minWeight = Number(params.get("minw"));
  if (params.has("center")) state.center = params.get("center");
  if (params.has("radius")) state.radius = Number(params.get("radius"));
  if (params.has("person")) state.person = params.get("person");
  if (params.has("athr")) state.actionThreshold = Number(params.get("athr"));
  if (params.has("cooc")) state.minCooccur = Number(params.get("cooc"));
  if (params.has("pos")) state.positions = decodePositions(params.get("pos")!);
  return state;
}
