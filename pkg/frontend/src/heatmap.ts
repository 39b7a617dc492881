/**
 * Field heatmap: snapshot CSV (x,y,value rows on a structured grid) to PNG.
 *
 * The grid shape is inferred from the distinct x and y coordinates; every
 * (x, y) cell must be present exactly once. Values map onto the shared
 * diverging scale, [-1, 1] unless overridden.
 *
 * Usage: heatmap <snapshot.csv> <out.png> [--min V] [--max V] [--scale N]
 */

import { writeFileSync } from "node:fs";

import { diverging } from "./colormap.js";
import { readSnapshot, SnapshotPoints } from "./csv.js";
import { encodePng, makeImage, setPixel } from "./png.js";

export interface HeatmapOptions {
  min?: number; // color-scale low end, default -1
  max?: number; // color-scale high end, default 1
  scale?: number; // pixels per grid node, default 16
}

export interface Grid {
  nx: number;
  ny: number;
  /** row-major values, index = iy * nx + ix with iy increasing in y */
  values: number[];
}

export function toGrid(points: SnapshotPoints): Grid {
  const xs = [...new Set(points.x)].sort((a, b) => a - b);
  const ys = [...new Set(points.y)].sort((a, b) => a - b);
  const xIndex = new Map(xs.map((v, i) => [v, i]));
  const yIndex = new Map(ys.map((v, i) => [v, i]));
  if (xs.length * ys.length !== points.value.length) {
    throw new Error(
      `snapshot is not a full structured grid: ${points.value.length} points ` +
      `vs ${xs.length} x ${ys.length} coordinates`,
    );
  }
  const values = new Array<number>(points.value.length).fill(NaN);
  points.value.forEach((v, k) => {
    const ix = xIndex.get(points.x[k])!;
    const iy = yIndex.get(points.y[k])!;
    const slot = iy * xs.length + ix;
    if (!Number.isNaN(values[slot])) {
      throw new Error(`duplicate grid node at (${points.x[k]}, ${points.y[k]})`);
    }
    values[slot] = v;
  });
  return { nx: xs.length, ny: ys.length, values };
}

export function renderHeatmap(points: SnapshotPoints, options: HeatmapOptions = {}): Buffer {
  const { min = -1, max = 1, scale = 16 } = options;
  if (!(max > min)) throw new Error(`bad color range [${min}, ${max}]`);
  if (!(Number.isInteger(scale) && scale >= 1)) throw new Error(`bad --scale ${scale}`);
  const grid = toGrid(points);
  const img = makeImage(grid.nx * scale, grid.ny * scale);
  for (let iy = 0; iy < grid.ny; iy++) {
    for (let ix = 0; ix < grid.nx; ix++) {
      const rgb = diverging(grid.values[iy * grid.nx + ix], min, max);
      const top = (grid.ny - 1 - iy) * scale; // y axis points up, rows go down
      for (let dy = 0; dy < scale; dy++) {
        for (let dx = 0; dx < scale; dx++) {
          setPixel(img, ix * scale + dx, top + dy, rgb);
        }
      }
    }
  }
  return encodePng(img);
}

export function run(argv: string[]): number {
  const positional: string[] = [];
  const options: HeatmapOptions = {};
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--min") options.min = Number(argv[++i]);
    else if (arg === "--max") options.max = Number(argv[++i]);
    else if (arg === "--scale") options.scale = Number(argv[++i]);
    else positional.push(arg);
  }
  if (positional.length !== 2) {
    console.error("usage: heatmap <snapshot.csv> <out.png> [--min V] [--max V] [--scale N]");
    return 1;
  }
  try {
    const png = renderHeatmap(readSnapshot(positional[0]), options);
    writeFileSync(positional[1], png);
  } catch (err) {
    console.error(`heatmap: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  return 0;
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(run(process.argv.slice(2)));
}
