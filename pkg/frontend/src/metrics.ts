// Parse the /api/metrics CSV into rows and per-level aggregates for the
// dashboard chart.

export interface MetricsRow {
  worldId: string;
  level: number;
  rooms: number;
  leafRooms: number;
  assets: number;
  edges: number;
  diameter: number;
  pedestrians: number;
}

export interface Aggregate {
  metric: string;
  level: number;
  mean: number;
  variance: number;
  cv: number;
}

export interface ParsedMetrics {
  rows: MetricsRow[];
  aggregates: Aggregate[];
  pearson: Record<string, number>;
}

export function parseMetricsCsv(csv: string): ParsedMetrics {
  const rows: MetricsRow[] = [];
  const aggregates: Aggregate[] = [];
  const pearson: Record<string, number> = {};
  for (const line of csv.split("\n")) {
    if (!line || line.startsWith("world_id,") || line.startsWith("section,")) continue;
    const cells = line.split(",");
    if (cells[0] === "aggregate") {
      aggregates.push({
        metric: cells[1],
        level: Number(cells[2]),
        mean: Number(cells[3]),
        variance: Number(cells[4]),
        cv: Number(cells[5]),
      });
    } else if (cells[0] === "pearson_r") {
      pearson[cells[1]] = Number(cells[3]);
    } else {
      rows.push({
        worldId: cells[0],
        level: Number(cells[1]),
        rooms: Number(cells[2]),
        leafRooms: Number(cells[3]),
        assets: Number(cells[4]),
        edges: Number(cells[5]),
        diameter: Number(cells[6]),
        pedestrians: Number(cells[7]),
      });
    }
  }
  return { rows, aggregates, pearson };
}

export function levelMeans(parsed: ParsedMetrics, metric: string): Map<number, number> {
  const out = new Map<number, number>();
  for (const a of parsed.aggregates)
    if (a.metric === metric) out.set(a.level, a.mean);
  return new Map([...out.entries()].sort(([a], [b]) => a - b));
}
