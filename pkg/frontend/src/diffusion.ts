import { num, Row, SchemaError } from "./csv.js";
import {
  HEIGHT, MARGIN, PALETTE, WIDTH,
  esc, linearScale, px, svgDocument, ticks, title, xAxis, yAxis,
} from "./svg.js";

export const DIFFUSION_COLUMNS = ["model", "k", "seed_fraction", "step",
                                  "mean_followers"];

export interface DiffusionOptions {
  /** peak-period marker per assumed step duration, drawn at lead/duration */
  leadTimeH: number;
  stepDurationsH: number[];
}

export const DEFAULT_DIFFUSION: DiffusionOptions = {
  leadTimeH: 6,
  stepDurationsH: [1, 2, 3],
};

interface Series {
  label: string;
  points: { step: number; followers: number }[];
}

function groupSeries(rows: Row[]): Series[] {
  const by = new Map<string, Series>();
  for (const row of rows) {
    const label = `${row.model} k=${row.k} seed=${row.seed_fraction}`;
    let s = by.get(label);
    if (!s) {
      s = { label, points: [] };
      by.set(label, s);
    }
    s.points.push({ step: num(row, "step"), followers: num(row, "mean_followers") });
  }
  const series = [...by.values()];
  for (const s of series) s.points.sort((a, b) => a.step - b.step);
  return series;
}

export function renderDiffusion(rows: Row[],
                                options: DiffusionOptions = DEFAULT_DIFFUSION): string {
  const series = groupSeries(rows);
  const maxStep = Math.max(...series.map((s) => s.points[s.points.length - 1].step));
  const maxY = Math.max(1, ...series.map((s) => Math.max(...s.points.map((p) => p.followers))));

  const x = linearScale(0, Math.max(1, maxStep), MARGIN.left, WIDTH - MARGIN.right);
  const y = linearScale(0, maxY * 1.05, HEIGHT - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [title("Cumulative followers per propagation step")];
  parts.push(xAxis(x, ticks(0, maxStep), HEIGHT - MARGIN.bottom, "step"));
  parts.push(yAxis(y, ticks(0, maxY * 1.05), MARGIN.left, "mean followers"));

  // vertical markers where the discount window opens under each assumed
  // step duration
  const seen = new Set<number>();
  for (const dur of options.stepDurationsH) {
    if (dur <= 0) throw new SchemaError(`bad step duration ${dur}`);
    const peakStep = Math.floor(options.leadTimeH / dur);
    if (seen.has(peakStep) || peakStep > maxStep) continue;
    seen.add(peakStep);
    const xx = x(peakStep);
    parts.push(`<line class="peak" x1="${px(xx)}" y1="${px(MARGIN.top)}" x2="${px(xx)}" y2="${px(HEIGHT - MARGIN.bottom)}" stroke="#555" stroke-dasharray="4 3"/>`);
    parts.push(`<text x="${px(xx + 3)}" y="${px(MARGIN.top + 12)}" font-size="10" fill="#555">${esc(`${dur}h steps`)}</text>`);
  }

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.points.map((p) => `${px(x(p.step))},${px(y(p.followers))}`).join(" ");
    parts.push(`<polyline class="trace" fill="none" stroke="${color}" stroke-width="1.8" points="${pts}"/>`);
    parts.push(`<text x="${px(WIDTH - MARGIN.right - 4)}" y="${px(MARGIN.top + 14 + 14 * i)}" text-anchor="end" font-size="11" fill="${color}">${esc(s.label)}</text>`);
  });

  return svgDocument(parts.join("\n"));
}
