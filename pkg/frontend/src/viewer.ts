// Pure helpers over the server-rendered SVG so the preview logic is
// testable without a live DOM.

export const LAYER_IDS = [
  "layer-rooms",
  "layer-doorways",
  "layer-zones",
  "layer-hulls",
  "layer-agents",
] as const;

export type LayerId = (typeof LAYER_IDS)[number];

export function countSvgRooms(svg: string): number {
  return (svg.match(/class="room"/g) ?? []).length;
}

export function svgLayerIds(svg: string): string[] {
  return [...svg.matchAll(/<g id="(layer-[a-z]+)">/g)].map((m) => m[1]);
}

/** Toggle a layer by injecting/removing display:none on its <g> element. */
export function setLayerVisible(svg: string, layer: LayerId, visible: boolean): string {
  const shown = `<g id="${layer}">`;
  const hidden = `<g id="${layer}" style="display:none">`;
  if (visible) return svg.replace(hidden, shown);
  if (svg.includes(hidden)) return svg;
  return svg.replace(shown, hidden);
}

export function layerVisible(svg: string, layer: LayerId): boolean {
  return !svg.includes(`<g id="${layer}" style="display:none">`);
}
