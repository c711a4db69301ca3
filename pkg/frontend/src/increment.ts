import { num, Row } from "./csv.js";
import {
  HEIGHT, MARGIN, WIDTH,
  esc, linearScale, px, svgDocument, ticks, title, yAxis,
} from "./svg.js";

export const INCREMENT_COLUMNS = ["k", "step_duration_h", "increment"];

/** Bar chart: change in peak follow-through when the link is left out. */
export function renderIncrement(rows: Row[]): string {
  const bars = rows.map((row) => ({
    label: `k=${row.k}, ${row.step_duration_h}h`,
    // percentage points read better than raw fractions at this size
    value: num(row, "increment") * 100,
  }));

  const lo = Math.min(0, ...bars.map((b) => b.value));
  const hi = Math.max(0, ...bars.map((b) => b.value));
  const pad = (hi - lo || 1) * 0.15;
  const y = linearScale(lo - pad, hi + pad, HEIGHT - MARGIN.bottom, MARGIN.top);

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const slot = plotW / bars.length;
  const barW = Math.min(60, slot * 0.6);

  const parts: string[] = [
    title("Peak follow-through change from omitting the link"),
    yAxis(y, ticks(lo - pad, hi + pad), MARGIN.left, "percentage points"),
  ];
  const zero = y(0);
  parts.push(`<line x1="${px(MARGIN.left)}" y1="${px(zero)}" x2="${px(WIDTH - MARGIN.right)}" y2="${px(zero)}" stroke="black"/>`);

  bars.forEach((b, i) => {
    const cx = MARGIN.left + slot * (i + 0.5);
    const top = Math.min(zero, y(b.value));
    const h = Math.abs(y(b.value) - zero);
    parts.push(`<rect class="bar" x="${px(cx - barW / 2)}" y="${px(top)}" width="${px(barW)}" height="${px(h)}" fill="#2b6cb0"/>`);
    const labelY = b.value >= 0 ? top - 5 : top + h + 12;
    parts.push(`<text x="${px(cx)}" y="${px(labelY)}" text-anchor="middle" font-size="11">${esc(b.value.toFixed(1))}</text>`);
    parts.push(`<text x="${px(cx)}" y="${px(HEIGHT - MARGIN.bottom + 18)}" text-anchor="middle" font-size="11">${esc(b.label)}</text>`);
  });
  parts.push(`<text x="${px((MARGIN.left + WIDTH - MARGIN.right) / 2)}" y="${px(HEIGHT - MARGIN.bottom + 40)}" text-anchor="middle" font-size="13">forwards per node, assumed step duration</text>`);

  return svgDocument(parts.join("\n"));
}
