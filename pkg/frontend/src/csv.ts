import { readFileSync } from "node:fs";
import { join } from "node:path";

export interface RunData {
  config: Record<string, unknown>;
  header: string[];
  rows: Record<string, string>[];
}

export class SchemaError extends Error {}

/** Load a run directory's data.csv: provenance line, header row, data rows. */
export function loadRun(runDir: string): RunData {
  const raw = readFileSync(join(runDir, "data.csv"), "utf8");
  const lines = raw.split("\n").filter((ln) => ln.length > 0);
  let config: Record<string, unknown> = {};
  let start = 0;
  if (lines[0]?.startsWith("#")) {
    config = JSON.parse(lines[0].slice(1).trim());
    start = 1;
  }
  if (lines.length <= start) {
    throw new SchemaError(`${runDir}: data.csv has no header row`);
  }
  const header = lines[start].split(",");
  const rows = lines.slice(start + 1).map((ln) => {
    const cells = ln.split(",");
    const row: Record<string, string> = {};
    header.forEach((name, i) => {
      row[name] = cells[i] ?? "";
    });
    return row;
  });
  return { config, header, rows };
}

/** Require the exact column list emitted by the experiment runner. */
export function expectColumns(data: RunData, expected: string[], figId: string): void {
  if (
    data.header.length !== expected.length ||
    expected.some((name, i) => data.header[i] !== name)
  ) {
    throw new SchemaError(
      `figure ${figId} expects columns [${expected.join(",")}], ` +
        `found [${data.header.join(",")}]`,
    );
  }
  if (data.rows.length === 0) {
    throw new SchemaError(`figure ${figId}: data.csv has no rows`);
  }
}

export function num(row: Record<string, string>, key: string): number {
  const v = Number(row[key]);
  if (Number.isNaN(v)) {
    throw new SchemaError(`column ${key}: not a number: ${row[key]}`);
  }
  return v;
}
