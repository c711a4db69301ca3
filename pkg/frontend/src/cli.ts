import { writeFileSync } from "fs";
import { pathToFileURL } from "url";
import { readCsv, Row, SchemaError } from "./csv.js";
import { DEFAULT_DIFFUSION, DIFFUSION_COLUMNS, renderDiffusion } from "./diffusion.js";
import { INCREMENT_COLUMNS, renderIncrement } from "./increment.js";
import { HEATMAP_COLUMNS, renderHeatmap } from "./heatmap.js";
import { DEFAULT_LINEMAP, LINEMAP_COLUMNS, renderLinemap } from "./linemap.js";

const KINDS = ["diffusion", "increment", "heatmap", "linemap"] as const;
type Kind = (typeof KINDS)[number];

interface Args {
  kind: Kind;
  inputs: string[];
  out: string;
  leadTimeH: number;
  stepDurationsH: number[];
  trippedColor: string;
}

const USAGE =
  "usage: render --kind <diffusion|increment|heatmap|linemap> " +
  "--in <csv...> --out <svg> [--lead-h <n>] [--durations <h,h,...>] " +
  "[--tripped-color <css>]";

export function parseArgs(argv: string[]): Args {
  if (argv[0] !== "render") {
    throw new SchemaError(USAGE);
  }
  const args: Args = {
    kind: "diffusion",
    inputs: [],
    out: "",
    leadTimeH: DEFAULT_DIFFUSION.leadTimeH,
    stepDurationsH: [...DEFAULT_DIFFUSION.stepDurationsH],
    trippedColor: DEFAULT_LINEMAP.trippedColor,
  };
  let kindSeen = false;
  let i = 1;
  const value = (flag: string): string => {
    if (i + 1 >= argv.length) throw new SchemaError(`${flag} needs a value`);
    i += 1;
    return argv[i];
  };
  for (; i < argv.length; i++) {
    const flag = argv[i];
    if (flag === "--kind") {
      const v = value(flag);
      if (!KINDS.includes(v as Kind)) {
        throw new SchemaError(`unknown kind "${v}" (expected ${KINDS.join(", ")})`);
      }
      args.kind = v as Kind;
      kindSeen = true;
    } else if (flag === "--in") {
      args.inputs.push(value(flag));
      while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
        i += 1;
        args.inputs.push(argv[i]);
      }
    } else if (flag === "--out") {
      args.out = value(flag);
    } else if (flag === "--lead-h") {
      args.leadTimeH = Number(value(flag));
    } else if (flag === "--durations") {
      args.stepDurationsH = value(flag).split(",").map(Number);
    } else if (flag === "--tripped-color") {
      args.trippedColor = value(flag);
    } else {
      throw new SchemaError(`unknown flag "${flag}"\n${USAGE}`);
    }
  }
  if (!kindSeen || args.inputs.length === 0 || !args.out) {
    throw new SchemaError(USAGE);
  }
  return args;
}

function readAll(paths: string[], columns: string[]): Row[] {
  return paths.flatMap((p) => readCsv(p, columns));
}

export function render(args: Args): string {
  switch (args.kind) {
    case "diffusion":
      return renderDiffusion(readAll(args.inputs, DIFFUSION_COLUMNS), {
        leadTimeH: args.leadTimeH,
        stepDurationsH: args.stepDurationsH,
      });
    case "increment":
      return renderIncrement(readAll(args.inputs, INCREMENT_COLUMNS));
    case "heatmap":
      return renderHeatmap(readAll(args.inputs.slice(0, 1), HEATMAP_COLUMNS));
    case "linemap":
      return renderLinemap(readAll(args.inputs.slice(0, 1), LINEMAP_COLUMNS), {
        trippedColor: args.trippedColor,
      });
  }
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }
  try {
    writeFileSync(args.out, render(args));
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }
  console.log(`wrote ${args.out}`);
  return 0;
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
