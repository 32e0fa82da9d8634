import { describe, expect, it } from "vitest";

import {
  LAYER_IDS,
  countSvgRooms,
  layerVisible,
  setLayerVisible,
  svgLayerIds,
} from "../src/viewer.js";

const SVG = [
  '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 10 10">',
  '<g id="layer-rooms">',
  '<polygon class="room" data-room="a" points="0,0 1,0 1,1 0,1"/>',
  '<polygon class="room" data-room="b" points="1,0 2,0 2,1 1,1"/>',
  "</g>",
  '<g id="layer-doorways"></g>',
  '<g id="layer-zones"></g>',
  '<g id="layer-hulls"></g>',
  '<g id="layer-agents"></g>',
  "</svg>",
].join("\n");

describe("svg helpers", () => {
  it("counts rooms", () => {
    expect(countSvgRooms(SVG)).toBe(2);
    expect(countSvgRooms("<svg></svg>")).toBe(0);
  });

  it("finds the five layers", () => {
    expect(svgLayerIds(SVG)).toEqual([...LAYER_IDS]);
  });

  it("toggles layer visibility idempotently", () => {
    let svg = setLayerVisible(SVG, "layer-zones", false);
    expect(layerVisible(svg, "layer-zones")).toBe(false);
    expect(layerVisible(svg, "layer-rooms")).toBe(true);
    svg = setLayerVisible(svg, "layer-zones", false);
    expect(layerVisible(svg, "layer-zones")).toBe(false);
    svg = setLayerVisible(svg, "layer-zones", true);
    expect(svg).toBe(SVG);
  });
});
