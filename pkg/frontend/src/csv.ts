/**
 * Readers for the solver's CSV outputs.
 *
 * Series files carry the fixed header
 * `t,mass_u,mass_v,energy,energy_nonlocal,u_min,u_max,v_min,v_max`;
 * snapshot files carry `x,y,value` with one row per mesh vertex.
 */

import { readFileSync } from "node:fs";

export const SERIES_COLUMNS = [
  "t",
  "mass_u",
  "mass_v",
  "energy",
  "energy_nonlocal",
  "u_min",
  "u_max",
  "v_min",
  "v_max",
] as const;

export type SeriesColumn = (typeof SERIES_COLUMNS)[number];

export interface Series {
  /** column name -> values, all of equal length */
  columns: Map<SeriesColumn, number[]>;
  length: number;
}

export interface SnapshotPoints {
  x: number[];
  y: number[];
  value: number[];
}

function splitNonEmptyLines(text: string): string[] {
  return text.split(/\r?\n/).filter((line) => line.trim().length > 0);
}

function parseNumber(token: string, where: string): number {
  const value = Number(token);
  if (!Number.isFinite(value)) {
    throw new Error(`non-numeric value ${JSON.stringify(token)} in ${where}`);
  }
  return value;
}

export function parseSeries(text: string, source = "<series>"): Series {
  const lines = splitNonEmptyLines(text);
  if (lines.length === 0 || lines[0].trim() !== SERIES_COLUMNS.join(",")) {
    throw new Error(`${source}: missing or unexpected series header`);
  }
  if (lines.length === 1) {
    throw new Error(`${source}: series has a header but no data rows`);
  }
  const columns = new Map<SeriesColumn, number[]>(
    SERIES_COLUMNS.map((name) => [name, []]),
  );
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== SERIES_COLUMNS.length) {
      throw new Error(`${source}: row ${i} has ${parts.length} fields`);
    }
    SERIES_COLUMNS.forEach((name, j) => {
      columns.get(name)!.push(parseNumber(parts[j], `${source} row ${i}`));
    });
  }
  return { columns, length: lines.length - 1 };
}

export function readSeries(path: string): Series {
  return parseSeries(readFileSync(path, "utf8"), path);
}

export function parseSnapshot(text: string, source = "<snapshot>"): SnapshotPoints {
  const lines = splitNonEmptyLines(text);
  if (lines.length === 0 || lines[0].trim() !== "x,y,value") {
    throw new Error(`${source}: missing or unexpected snapshot header`);
  }
  const out: SnapshotPoints = { x: [], y: [], value: [] };
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== 3) {
      throw new Error(`${source}: row ${i} has ${parts.length} fields`);
    }
    out.x.push(parseNumber(parts[0], `${source} row ${i}`));
    out.y.push(parseNumber(parts[1], `${source} row ${i}`));
    out.value.push(parseNumber(parts[2], `${source} row ${i}`));
  }
  if (out.value.length === 0) {
    throw new Error(`${source}: snapshot has no data rows`);
  }
  return out;
}

export function readSnapshot(path: string): SnapshotPoints {
  return parseSnapshot(readFileSync(path, "utf8"), path);
}
