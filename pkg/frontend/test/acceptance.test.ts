/** End-to-end check on the bundled sample outputs: both plotting tools emit
 *  image files without error, and the decaying-mass sample curve is monotone
 *  non-increasing. */

import { describe, expect, it } from "vitest";
import { mkdtempSync, readFileSync, statSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";

import { readSeries } from "../src/csv.js";
import { run as heatmapRun } from "../src/heatmap.js";
import { run as seriesRun } from "../src/series.js";
import { SAMPLE_DIR } from "./csv.test.js";

describe("sample-output acceptance", () => {
  it("emits image files from the bundled CSVs without error", () => {
    const dir = mkdtempSync(path.join(tmpdir(), "plots-"));
    const heatmapOut = path.join(dir, "u_t2.png");
    const seriesOut = path.join(dir, "mass_v.svg");
    expect(heatmapRun([path.join(SAMPLE_DIR, "snapshot_u_t2.csv"), heatmapOut])).toBe(0);
    expect(seriesRun([path.join(SAMPLE_DIR, "series.csv"), seriesOut,
                      "--columns", "mass_v"])).toBe(0);
    expect(statSync(heatmapOut).size).toBeGreaterThan(100);
    expect(statSync(seriesOut).size).toBeGreaterThan(100);
    expect(readFileSync(heatmapOut).subarray(1, 4).toString("ascii")).toBe("PNG");
  });

  it("sample mass_v curve is monotone non-increasing", () => {
    const mass = readSeries(path.join(SAMPLE_DIR, "series.csv")).columns.get("mass_v")!;
    for (let i = 1; i < mass.length; i++) {
      expect(mass[i]).toBeLessThanOrEqual(mass[i - 1]);
    }
    expect(mass[mass.length - 1]).toBeLessThan(mass[0]);
  });
});
