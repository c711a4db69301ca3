import { num, Row } from "./csv.js";
import {
  HEIGHT, MARGIN, WIDTH,
  blackoutColor, esc, px, svgDocument, title,
} from "./svg.js";

export const HEATMAP_COLUMNS = ["follow_rate", "ev_rate", "mean_blackout_fraction"];

/** Blackout fraction over the follow-rate x EV-rate plane.  The color scale
 * is pinned to [0, 1] so separate runs are comparable. */
export function renderHeatmap(rows: Row[]): string {
  const follows = [...new Set(rows.map((r) => num(r, "follow_rate")))].sort((a, b) => a - b);
  const evs = [...new Set(rows.map((r) => num(r, "ev_rate")))].sort((a, b) => a - b);

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const cw = plotW / follows.length;
  const ch = plotH / evs.length;
  const annotate = cw >= 34 && ch >= 18;

  const parts: string[] = [title("Blackout fraction by follow-through and EV adoption")];
  for (const row of rows) {
    const f = num(row, "follow_rate");
    const e = num(row, "ev_rate");
    const v = num(row, "mean_blackout_fraction");
    const xi = follows.indexOf(f);
    // highest EV rate on top
    const yi = evs.length - 1 - evs.indexOf(e);
    const x = MARGIN.left + xi * cw;
    const y = MARGIN.top + yi * ch;
    parts.push(`<rect class="cell" x="${px(x)}" y="${px(y)}" width="${px(cw)}" height="${px(ch)}" fill="${blackoutColor(v)}"/>`);
    if (annotate) {
      const fill = v > 0.5 ? "white" : "black";
      parts.push(`<text x="${px(x + cw / 2)}" y="${px(y + ch / 2 + 4)}" text-anchor="middle" font-size="11" fill="${fill}">${esc(v.toFixed(2))}</text>`);
    }
  }

  follows.forEach((f, i) => {
    const x = MARGIN.left + (i + 0.5) * cw;
    parts.push(`<text x="${px(x)}" y="${px(HEIGHT - MARGIN.bottom + 16)}" text-anchor="middle" font-size="11">${esc(String(f))}</text>`);
  });
  evs.forEach((e, i) => {
    const y = MARGIN.top + (evs.length - 1 - i + 0.5) * ch;
    parts.push(`<text x="${px(MARGIN.left - 8)}" y="${px(y + 4)}" text-anchor="end" font-size="11">${esc(String(e))}</text>`);
  });
  parts.push(`<text x="${px(MARGIN.left + plotW / 2)}" y="${px(HEIGHT - MARGIN.bottom + 40)}" text-anchor="middle" font-size="13">follow-through rate</text>`);
  const cy = MARGIN.top + plotH / 2;
  parts.push(`<text x="16" y="${px(cy)}" text-anchor="middle" font-size="13" transform="rotate(-90 16 ${px(cy)})">EV adoption rate</text>`);

  // fixed-scale color bar
  const barX = WIDTH - MARGIN.right + 6;
  for (let i = 0; i < 20; i++) {
    const v = 1 - i / 19;
    parts.push(`<rect x="${px(barX)}" y="${px(MARGIN.top + (plotH / 20) * i)}" width="10" height="${px(plotH / 20 + 0.5)}" fill="${blackoutColor(v)}"/>`);
  }
  parts.push(`<text x="${px(barX + 5)}" y="${px(MARGIN.top - 6)}" text-anchor="middle" font-size="10">1</text>`);
  parts.push(`<text x="${px(barX + 5)}" y="${px(MARGIN.top + plotH + 12)}" text-anchor="middle" font-size="10">0</text>`);

  return svgDocument(parts.join("\n"));
}
