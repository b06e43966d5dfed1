/** Wire types mirroring the service's canonical JSON. */

export interface VertexFrame {
  key: number;
  name: string;
  vtype: string;
  weight: number;
  info: Record<string, unknown>;
}

export interface EdgeFrame {
  etype: string;
  v1: number;
  v2: number;
  weight: number;
  info: Record<string, unknown>;
}

export interface NetworkJson {
  event_id: string;
  provenance: Record<string, unknown>;
  vertices: VertexFrame[];
  edges: EdgeFrame[];
}

export interface SliceInfo {
  index: number;
  start: string;
  end: string;
  documents: number;
}

export interface TopWord {
  word: string;
  weight: number;
}

export interface EventNode {
  id: string;
  level: string;
  topic: number;
  members: string[];
  top_words: TopWord[];
  children: EventNode[];
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}
