import { describe, expect, it } from "vitest";

import { GraphEditor } from "../src/editor.js";

describe("GraphEditor", () => {
  it("builds a canonical document", () => {
    const ed = new GraphEditor();
    ed.addRoom("b");
    ed.addRoom("a", "kitchen");
    ed.addEdge("b", "a");
    const doc = ed.toDocument();
    expect(doc.rooms.map((r) => r.id)).toEqual(["a", "b"]);
    expect(doc.edges).toEqual([["a", "b"]]);
    expect(doc.external_doorways).toEqual(["b"]); // first room gets the door
    expect(ed.validate()).toEqual([]);
  });

  it("rejects bad edits eagerly", () => {
    const ed = new GraphEditor();
    ed.addRoom("a");
    expect(() => ed.addRoom("a")).toThrow(/already exists/);
    expect(() => ed.addEdge("a", "a")).toThrow(/self-loop/);
    expect(() => ed.addEdge("a", "zz")).toThrow(/existing rooms/);
  });

  it("removing a room drops its edges and external flag", () => {
    const ed = new GraphEditor();
    ed.addRoom("a");
    ed.addRoom("b");
    ed.addEdge("a", "b");
    ed.removeRoom("a");
    const doc = ed.toDocument();
    expect(doc.edges).toEqual([]);
    expect(doc.external_doorways).toEqual([]);
    expect(ed.validate().join(" ")).toContain("external doorway");
  });

  it("round-trips through a document", () => {
    const ed = new GraphEditor();
    ed.addRoom("a");
    ed.addRoom("b");
    ed.addEdge("a", "b");
    ed.addAsset("a", { description: "chair", size: [0.5, 0.5, 0.9], color: "red" });
    ed.context = "office";
    const clone = GraphEditor.fromDocument(ed.toDocument());
    expect(clone.toDocument()).toEqual(ed.toDocument());
  });

  it("edge set is deduplicated regardless of direction", () => {
    const ed = new GraphEditor();
    ed.addRoom("a");
    ed.addRoom("b");
    ed.addEdge("a", "b");
    ed.addEdge("b", "a");
    expect(ed.edgeCount).toBe(1);
  });
});
