// Editable scene-graph state behind the graph editor panel.

import type { AssetSpec, SceneGraphDoc } from "./types.js";
import { validateSceneGraph } from "./validation.js";

export class GraphEditor {
  private rooms = new Map<string, { category: string; assets: AssetSpec[] }>();
  private edges = new Set<string>(); // "a|b" with a < b
  private externals = new Set<string>();
  context = "generic";
  difficulty = 1;

  addRoom(id: string, category = "room"): void {
    if (!id) throw new Error("room id must be non-empty");
    if (this.rooms.has(id)) throw new Error(`room ${id} already exists`);
    this.rooms.set(id, { category, assets: [] });
    if (this.externals.size === 0) this.externals.add(id);
  }

  removeRoom(id: string): void {
    this.rooms.delete(id);
    this.externals.delete(id);
    for (const key of [...this.edges])
      if (key.split("|").includes(id)) this.edges.delete(key);
  }

  addEdge(a: string, b: string): void {
    if (a === b) throw new Error("self-loop edges are not allowed");
    if (!this.rooms.has(a) || !this.rooms.has(b))
      throw new Error("both edge endpoints must be existing rooms");
    this.edges.add([a, b].sort().join("|"));
  }

  removeEdge(a: string, b: string): void {
    this.edges.delete([a, b].sort().join("|"));
  }

  setExternal(id: string, on: boolean): void {
    if (!this.rooms.has(id)) throw new Error(`no room ${id}`);
    if (on) this.externals.add(id);
    else this.externals.delete(id);
  }

  addAsset(roomId: string, asset: AssetSpec): void {
    const room = this.rooms.get(roomId);
    if (!room) throw new Error(`no room ${roomId}`);
    room.assets.push(asset);
  }

  get roomCount(): number {
    return this.rooms.size;
  }

  get edgeCount(): number {
    return this.edges.size;
  }

  toDocument(): SceneGraphDoc {
    return {
      version: "1",
      rooms: [...this.rooms.entries()]
        .sort(([a], [b]) => (a < b ? -1 : 1))
        .map(([id, r]) => ({ id, category: r.category, assets: [...r.assets] })),
      edges: [...this.edges].sort().map((k) => k.split("|") as [string, string]),
      external_doorways: [...this.externals].sort(),
      context: this.context,
      difficulty: this.difficulty,
    };
  }

  validate(): string[] {
    return validateSceneGraph(this.toDocument());
  }

  static fromDocument(doc: SceneGraphDoc): GraphEditor {
    const ed = new GraphEditor();
    for (const r of doc.rooms) {
      ed.rooms.set(r.id, { category: r.category, assets: [...r.assets] });
    }
    ed.externals = new Set(doc.external_doorways);
    for (const [a, b] of doc.edges) ed.edges.add([a, b].sort().join("|"));
    ed.context = doc.context;
    ed.difficulty = doc.difficulty;
    return ed;
  }
}
