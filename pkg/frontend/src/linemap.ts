import { num, Row, SchemaError } from "./csv.js";
import { esc, px, svgDocument, title } from "./svg.js";

export const LINEMAP_COLUMNS = ["line_id", "x1", "y1", "x2", "y2", "status"];

export interface LinemapOptions {
  trippedColor: string;
}

export const DEFAULT_LINEMAP: LinemapOptions = { trippedColor: "#d32f2f" };

const KNOWN_STATUS = ["active", "tripped", "deenergized"];

/** City map of feeder lines; red marks lines lost to the attack (tripped
 * breakers solid, de-energized subtrees dashed). */
export function renderLinemap(rows: Row[],
                              options: LinemapOptions = DEFAULT_LINEMAP): string {
  for (const row of rows) {
    if (!KNOWN_STATUS.includes(row.status)) {
      throw new SchemaError(`unknown line status "${row.status}"`);
    }
  }

  const xs = rows.flatMap((r) => [num(r, "x1"), num(r, "x2")]);
  const ys = rows.flatMap((r) => [num(r, "y1"), num(r, "y2")]);
  const lo = [Math.min(...xs), Math.min(...ys)];
  const hi = [Math.max(...xs), Math.max(...ys)];

  const size = 640;
  const margin = 44;
  const span = Math.max(hi[0] - lo[0], hi[1] - lo[1]) || 1;
  const scale = (size - 2 * margin) / span;
  const sx = (x: number) => margin + (x - lo[0]) * scale;
  // flip so north stays up
  const sy = (y: number) => size - margin - (y - lo[1]) * scale;

  const styleOf = (status: string): string => {
    if (status === "tripped") {
      return `stroke="${options.trippedColor}" stroke-width="2.2"`;
    }
    if (status === "deenergized") {
      return `stroke="${options.trippedColor}" stroke-width="1.6" stroke-dasharray="5 3"`;
    }
    return `stroke="#9e9e9e" stroke-width="1"`;
  };

  const parts: string[] = [title("Feeder lines after the attack window", size)];
  // draw grey first so red stays visible at junctions
  const order = (s: string) => (s === "active" ? 0 : 1);
  const sorted = [...rows].sort((a, b) => order(a.status) - order(b.status));
  for (const row of sorted) {
    parts.push(`<line class="feeder ${row.status}" x1="${px(sx(num(row, "x1")))}" y1="${px(sy(num(row, "y1")))}" x2="${px(sx(num(row, "x2")))}" y2="${px(sy(num(row, "y2")))}" ${styleOf(row.status)}/>`);
  }

  // legend covers every status present in the data
  const present = KNOWN_STATUS.filter((s) => rows.some((r) => r.status === s));
  present.forEach((status, i) => {
    const y = size - 26;
    const x = margin + i * 170;
    parts.push(`<line x1="${px(x)}" y1="${px(y)}" x2="${px(x + 28)}" y2="${px(y)}" ${styleOf(status)}/>`);
    parts.push(`<text x="${px(x + 34)}" y="${px(y + 4)}" font-size="12">${esc(status)}</text>`);
  });

  return svgDocument(parts.join("\n"), size, size);
}
