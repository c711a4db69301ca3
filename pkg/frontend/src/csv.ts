import { readFileSync } from "fs";
import Papa from "papaparse";

export class SchemaError extends Error {}

export type Row = Record<string, string>;

/** Parse a header CSV and insist on the columns a figure needs. */
export function readCsv(path: string, required: string[]): Row[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const parsed = Papa.parse<Row>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new SchemaError(`${path}: ${e.message} (row ${e.row})`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const col of required) {
    if (!fields.includes(col)) {
      throw new SchemaError(`${path}: missing column "${col}"`);
    }
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  return parsed.data;
}

export function num(row: Row, col: string): number {
  const v = Number(row[col]);
  if (!Number.isFinite(v)) {
    throw new SchemaError(`column "${col}" holds non-numeric value "${row[col]}"`);
  }
  return v;
}
