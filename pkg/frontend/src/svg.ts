// String-built SVG primitives.  Everything is pure and uses fixed precision,
// so a given input renders to byte-identical output.

export const WIDTH = 720;
export const HEIGHT = 440;
export const MARGIN = { left: 64, right: 24, top: 40, bottom: 56 };

export const PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b",
                        "#17becf", "#e377c2", "#7f7f7f"];

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Fixed two-decimal coordinates keep the output stable across runs. */
export function px(x: number): string {
  return x.toFixed(2).replace(/\.00$/, "");
}

export type Scale = (v: number) => number;

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0;
  return (v) => (span === 0 ? (r0 + r1) / 2 : r0 + ((v - d0) / span) * (r1 - r0));
}

export function ticks(lo: number, hi: number, count = 5): number[] {
  if (lo === hi) return [lo];
  const step = (hi - lo) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(step)));
  const norm = step / mag;
  const nice = norm >= 5 ? 10 : norm >= 2 ? 5 : norm >= 1 ? 2 : 1;
  const inc = nice * mag;
  const start = Math.ceil(lo / inc) * inc;
  const out: number[] = [];
  for (let v = start; v <= hi + inc * 1e-9; v += inc) {
    out.push(Math.round(v / inc) * inc);
  }
  return out;
}

export function fmtTick(v: number): string {
  return Number.isInteger(v) ? String(v) : String(Number(v.toPrecision(4)));
}

export function svgDocument(body: string, width = WIDTH, height = HEIGHT): string {
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">
<rect width="${width}" height="${height}" fill="white"/>
${body}</svg>
`;
}

export function title(text: string, width = WIDTH): string {
  return `<text x="${px(width / 2)}" y="22" text-anchor="middle" font-size="15">${esc(text)}</text>`;
}

export function xAxis(scale: Scale, values: number[], y: number, label: string,
                      width = WIDTH): string {
  const parts = [
    `<line x1="${px(MARGIN.left)}" y1="${px(y)}" x2="${px(width - MARGIN.right)}" y2="${px(y)}" stroke="black"/>`,
  ];
  for (const v of values) {
    const x = scale(v);
    parts.push(`<line x1="${px(x)}" y1="${px(y)}" x2="${px(x)}" y2="${px(y + 5)}" stroke="black"/>`);
    parts.push(`<text x="${px(x)}" y="${px(y + 19)}" text-anchor="middle" font-size="11">${esc(fmtTick(v))}</text>`);
  }
  parts.push(`<text x="${px((MARGIN.left + width - MARGIN.right) / 2)}" y="${px(y + 40)}" text-anchor="middle" font-size="13">${esc(label)}</text>`);
  return parts.join("\n");
}

export function yAxis(scale: Scale, values: number[], x: number, label: string,
                      height = HEIGHT): string {
  const parts = [
    `<line x1="${px(x)}" y1="${px(MARGIN.top)}" x2="${px(x)}" y2="${px(height - MARGIN.bottom)}" stroke="black"/>`,
  ];
  for (const v of values) {
    const y = scale(v);
    parts.push(`<line x1="${px(x - 5)}" y1="${px(y)}" x2="${px(x)}" y2="${px(y)}" stroke="black"/>`);
    parts.push(`<text x="${px(x - 8)}" y="${px(y + 4)}" text-anchor="end" font-size="11">${esc(fmtTick(v))}</text>`);
  }
  const cy = (MARGIN.top + height - MARGIN.bottom) / 2;
  parts.push(`<text x="16" y="${px(cy)}" text-anchor="middle" font-size="13" transform="rotate(-90 16 ${px(cy)})">${esc(label)}</text>`);
  return parts.join("\n");
}

/** Fixed [0, 1] ramp from near-white to dark red; out-of-range clips. */
export function blackoutColor(v: number): string {
  const t = Math.max(0, Math.min(1, v));
  const from = [255, 245, 240];
  const to = [165, 15, 21];
  const ch = from.map((f, i) => Math.round(f + (to[i] - f) * t));
  return `rgb(${ch[0]},${ch[1]},${ch[2]})`;
}
