import { describe, expect, it } from "vitest";
import { existsSync, mkdtempSync, readFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { main, parseArgs } from "../src/cli.js";

const FIX = join(__dirname, "fixtures");

function outPath(): string {
  return join(mkdtempSync(join(tmpdir(), "figcli-")), "fig.svg");
}

describe("argument parsing", () => {
  it("parses a full render invocation", () => {
    const a = parseArgs(["render", "--kind", "heatmap",
      "--in", "h.csv", "--out", "h.svg"]);
    expect(a.kind).toBe("heatmap");
    expect(a.inputs).toEqual(["h.csv"]);
    expect(a.out).toBe("h.svg");
  });

  it("collects several --in paths and custom step durations", () => {
    const a = parseArgs(["render", "--kind", "diffusion",
      "--in", "a.csv", "b.csv", "--out", "o.svg",
      "--lead-h", "4", "--durations", "1,2"]);
    expect(a.inputs).toEqual(["a.csv", "b.csv"]);
    expect(a.leadTimeH).toBe(4);
    expect(a.stepDurationsH).toEqual([1, 2]);
  });

  it("rejects an unknown kind, naming the valid ones", () => {
    expect(() => parseArgs(["render", "--kind", "piechart",
      "--in", "x.csv", "--out", "o.svg"])).toThrow(/diffusion.*linemap/s);
  });

  it("rejects an unknown flag and a missing subcommand", () => {
    expect(() => parseArgs(["render", "--kind", "heatmap", "--frobnicate",
      "--in", "x.csv", "--out", "o.svg"])).toThrow(/frobnicate/);
    expect(() => parseArgs([])).toThrow();
    expect(() => parseArgs(["plot"])).toThrow();
  });
});

describe("end-to-end rendering", () => {
  it.each([
    ["diffusion", "mean_traces.csv"],
    ["increment", "increments.csv"],
    ["heatmap", "heatmap.csv"],
    ["linemap", "lines.csv"],
  ])("writes an svg file for kind %s", (kind, csv) => {
    const out = outPath();
    const rc = main(["render", "--kind", kind,
      "--in", join(FIX, csv), "--out", out]);
    expect(rc).toBe(0);
    expect(existsSync(out)).toBe(true);
    const svg = readFileSync(out, "utf8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("</svg>");
  });

  it("returns 1 for a missing input file", () => {
    expect(main(["render", "--kind", "heatmap",
      "--in", join(FIX, "nope.csv"), "--out", outPath()])).toBe(1);
  });

  it("returns 1 when the csv lacks a required column", () => {
    expect(main(["render", "--kind", "linemap",
      "--in", join(FIX, "heatmap.csv"), "--out", outPath()])).toBe(1);
  });

  it("returns 1 on bad arguments", () => {
    expect(main(["render", "--kind", "heatmap"])).toBe(1);
    expect(main([])).toBe(1);
  });

  it("passes the tripped color through to the line map", () => {
    const out = outPath();
    const rc = main(["render", "--kind", "linemap",
      "--in", join(FIX, "lines.csv"), "--out", out,
      "--tripped-color", "#123456"]);
    expect(rc).toBe(0);
    expect(readFileSync(out, "utf8")).toContain("#123456");
  });
});
