/**
 * Time-series plot: series CSV to an SVG line chart of chosen columns vs t.
 *
 * Usage: series <series.csv> <out.svg> [--columns mass_v,mass_u]
 */

import { writeFileSync } from "node:fs";

import { readSeries, Series, SeriesColumn, SERIES_COLUMNS } from "./csv.js";

const WIDTH = 640;
const HEIGHT = 400;
const MARGIN = { left: 70, right: 20, top: 20, bottom: 45 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = 10 ** Math.floor(Math.log10(span / count));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / chosen) * chosen; v <= hi + 1e-12 * span; v += chosen) {
    ticks.push(v);
  }
  return ticks;
}

function fmt(v: number): string {
  return Math.abs(v) < 1e-12 ? "0" : v.toPrecision(4).replace(/\.?0+($|e)/, "$1");
}

export function renderSeriesSvg(series: Series, columns: SeriesColumn[]): string {
  if (columns.length === 0) throw new Error("no columns selected");
  for (const c of columns) {
    if (!series.columns.has(c)) throw new Error(`unknown column ${JSON.stringify(c)}`);
  }
  const t = series.columns.get("t")!;
  const tLo = Math.min(...t);
  const tHi = Math.max(...t);
  let yLo = Infinity;
  let yHi = -Infinity;
  for (const c of columns) {
    for (const v of series.columns.get(c)!) {
      yLo = Math.min(yLo, v);
      yHi = Math.max(yHi, v);
    }
  }
  // a span within rounding noise of zero is a constant series: center it
  // instead of zooming into the last few ulps
  if (yHi - yLo <= 1e-9 * Math.max(Math.abs(yLo), Math.abs(yHi), 1e-30)) {
    const mid = 0.5 * (yLo + yHi);
    const half = Math.max(0.1 * Math.abs(mid), 0.5);
    yLo = mid - half;
    yHi = mid + half;
  }
  const pad = 0.05 * (yHi - yLo);
  yLo -= pad;
  yHi += pad;

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const px = (tv: number) =>
    MARGIN.left + (tHi > tLo ? ((tv - tLo) / (tHi - tLo)) * plotW : plotW / 2);
  const py = (v: number) => MARGIN.top + (1 - (v - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
  );
  for (const tick of niceTicks(tLo, tHi)) {
    const x = px(tick);
    parts.push(
      `<line x1="${x.toFixed(2)}" y1="${MARGIN.top}" x2="${x.toFixed(2)}" ` +
      `y2="${HEIGHT - MARGIN.bottom}" stroke="#ddd"/>`,
      `<text x="${x.toFixed(2)}" y="${HEIGHT - MARGIN.bottom + 16}" ` +
      `text-anchor="middle">${fmt(tick)}</text>`,
    );
  }
  for (const tick of niceTicks(yLo, yHi)) {
    const y = py(tick);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y.toFixed(2)}" x2="${WIDTH - MARGIN.right}" ` +
      `y2="${y.toFixed(2)}" stroke="#ddd"/>`,
      `<text x="${MARGIN.left - 6}" y="${(y + 4).toFixed(2)}" ` +
      `text-anchor="end">${fmt(tick)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
    `fill="none" stroke="#444"/>`,
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 8}" text-anchor="middle">t</text>`,
  );
  columns.forEach((c, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = series.columns
      .get(c)!
      .map((v, k) => `${px(t[k]).toFixed(2)},${py(v).toFixed(2)}`)
      .join(" ");
    parts.push(`<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    parts.push(
      `<rect x="${WIDTH - MARGIN.right - 130}" y="${MARGIN.top + 8 + 18 * i}" ` +
      `width="14" height="4" fill="${color}"/>`,
      `<text x="${WIDTH - MARGIN.right - 110}" y="${MARGIN.top + 14 + 18 * i}">${c}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

export function run(argv: string[]): number {
  const positional: string[] = [];
  let columns: SeriesColumn[] = ["mass_v"];
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--columns") {
      columns = argv[++i].split(",").map((s) => s.trim()) as SeriesColumn[];
    } else {
      positional.push(argv[i]);
    }
  }
  if (positional.length !== 2) {
    console.error(
      "usage: series <series.csv> <out.svg> [--columns name,name]\n" +
      `columns: ${SERIES_COLUMNS.join(", ")}`,
    );
    return 1;
  }
  try {
    writeFileSync(positional[1], renderSeriesSvg(readSeries(positional[0]), columns));
  } catch (err) {
    console.error(`series: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  return 0;
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(run(process.argv.slice(2)));
}
