import { describe, expect, it } from "vitest";
import { inflateSync } from "node:zlib";

import { encodePng, makeImage, pngSize, setPixel } from "../src/png.js";

describe("png writer", () => {
  it("encodes dimensions and pixel data losslessly", () => {
    const img = makeImage(5, 3);
    setPixel(img, 2, 1, [10, 200, 30]);
    const png = encodePng(img);
    expect(png.subarray(0, 8)).toEqual(
      Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    );
    expect(pngSize(png)).toEqual({ width: 5, height: 3 });

    // IHDR is fixed-size, so IDAT payload starts at a known offset
    const idatLen = png.readUInt32BE(8 + 25);
    expect(png.subarray(8 + 25 + 4, 8 + 25 + 8).toString("ascii")).toBe("IDAT");
    const raw = inflateSync(png.subarray(8 + 25 + 8, 8 + 25 + 8 + idatLen));
    const stride = 5 * 3 + 1;
    expect(raw.length).toBe(stride * 3);
    expect(raw[stride]).toBe(0); // filter byte
    const offset = stride * 1 + 1 + 2 * 3;
    expect([...raw.subarray(offset, offset + 3)]).toEqual([10, 200, 30]);
  });

  it("out-of-range setPixel is a no-op", () => {
    const img = makeImage(2, 2);
    setPixel(img, -1, 0, [0, 0, 0]);
    setPixel(img, 0, 5, [0, 0, 0]);
    expect([...img.pixels]).toEqual(Array(12).fill(255));
  });

  it("rejects degenerate sizes", () => {
    expect(() => makeImage(0, 4)).toThrow(/size/);
  });
});
