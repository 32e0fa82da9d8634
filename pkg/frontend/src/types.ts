// Shared document shapes; these mirror the server's JSON schemas.

export interface AssetSpec {
  description: string;
  size: [number, number, number];
  color: string;
}

export interface RoomNode {
  id: string;
  category: string;
  assets: AssetSpec[];
}

export interface SceneGraphDoc {
  version: "1";
  rooms: RoomNode[];
  edges: [string, string][];
  external_doorways: string[];
  context: string;
  difficulty: number;
}

export interface StageTimings {
  [stage: string]: number;
}

export interface GenerateResponse {
  worldIds: string[];
  worlds: { world_id: string; level: number; index: number; path: string }[];
  timings: StageTimings;
  perWorldTimings: Record<string, StageTimings>;
  failures: { level: number; index: number; error: string }[];
}

export interface ModelRecordDoc {
  id: string;
  description: string;
  footprint_hull: [number, number][];
  height: number;
  color_materials: [string, string][];
  room_affinity: Record<string, number>;
  tags: string[];
  score?: number;
}

export interface QueryResponse {
  results: ModelRecordDoc[];
  bundleVersion: number;
}

export interface ApiError {
  code: string;
  message: string;
}

export const CONTEXTS = ["hospital", "residential", "office", "generic"] as const;
