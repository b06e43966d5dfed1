/** Thin client over the read-only service. Responses are returned exactly as
 * the service sent them; no analysis happens on this side. */

import type { ApiErrorBody, EventNode, NetworkJson, SliceInfo } from "./types";

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

export interface FilterParams {
  vtypes?: string[];
  etypes?: string[];
  names?: string[];
  minWeight?: number | null;
}

export interface ActionParams {
  threshold?: number | null;
  minCooccur?: number | null;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async get<T>(path: string, signal?: AbortSignal): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, { signal });
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") throw err;
      throw new ApiError("unreachable", `service unreachable: ${err}`, 0);
    }
    if (!response.ok) {
      let body: ApiErrorBody | null = null;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        // non-JSON error body
      }
      throw new ApiError(
        body?.error?.code ?? "internal",
        body?.error?.message ?? `request failed (${response.status})`,
        response.status,
      );
    }
    return (await response.json()) as T;
  }

  slices(signal?: AbortSignal): Promise<SliceInfo[]> {
    return this.get("/slices", signal);
  }

  sliceEvents(index: number, signal?: AbortSignal): Promise<EventNode[]> {
    return this.get(`/slices/${index}/events`, signal);
  }

  network(eventId: string, signal?: AbortSignal): Promise<NetworkJson> {
    return this.get(`/events/${eventId}/network`, signal);
  }

  analyzeFilter(
    eventId: string,
    params: FilterParams,
    signal?: AbortSignal,
  ): Promise<NetworkJson> {
    const query = new URLSearchParams();
    for (const vtype of params.vtypes ?? []) query.append("vtype", vtype);
    for (const etype of params.etypes ?? []) query.append("etype", etype);
    for (const name of params.names ?? []) query.append("name", name);
    if (params.minWeight != null) {
      query.set("min_weight", String(params.minWeight));
    }
    return this.get(`/events/${eventId}/analyze/filter?${query}`, signal);
  }

  analyzePlt(
    eventId: string,
    person: string,
    signal?: AbortSignal,
  ): Promise<NetworkJson> {
    const query = new URLSearchParams({ person });
    return this.get(`/events/${eventId}/analyze/plt?${query}`, signal);
  }

  analyzeAction(
    eventId: string,
    params: ActionParams,
    signal?: AbortSignal,
  ): Promise<NetworkJson> {
    const query = new URLSearchParams();
    if (params.threshold != null) query.set("threshold", String(params.threshold));
    if (params.minCooccur != null) {
      query.set("min_cooccur", String(params.minCooccur));
    }
    return this.get(`/events/${eventId}/analyze/action?${query}`, signal);
  }

  analyzePath(
    eventId: string,
    from: string,
    to: string,
    signal?: AbortSignal,
  ): Promise<NetworkJson> {
    const query = new URLSearchParams({ from, to });
    return this.get(`/events/${eventId}/analyze/path?${query}`, signal);
  }

  analyzeEgo(
    eventId: string,
    center: string,
    radius: number,
    signal?: AbortSignal,
  ): Promise<NetworkJson> {
    const query = new URLSearchParams({ center, radius: String(radius) });
    return this.get(`/events/${eventId}/analyze/ego?${query}`, signal);
  }
}
