/**
 * Minimal PNG writer: 8-bit RGB, no interlacing, filter type 0 on every
 * scanline, zlib via node's built-in deflate. Enough for heatmap rasters
 * without pulling in a native canvas.
 */

import { deflateSync } from "node:zlib";

const SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(buffer: Buffer): number {
  let crc = 0xffffffff;
  for (const byte of buffer) {
    crc = CRC_TABLE[(crc ^ byte) & 0xff] ^ (crc >>> 8);
  }
  return (crc ^ 0xffffffff) >>> 0;
}

function chunk(type: string, data: Buffer): Buffer {
  const header = Buffer.alloc(4);
  header.writeUInt32BE(data.length);
  const body = Buffer.concat([Buffer.from(type, "ascii"), data]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(body));
  return Buffer.concat([header, body, crc]);
}

/** RGB image with row-major pixels (3 bytes per pixel, top row first). */
export interface RgbImage {
  width: number;
  height: number;
  pixels: Uint8Array; // length = width * height * 3
}

export function makeImage(width: number, height: number): RgbImage {
  if (width < 1 || height < 1) {
    throw new Error(`invalid image size ${width}x${height}`);
  }
  return { width, height, pixels: new Uint8Array(width * height * 3).fill(255) };
}

export function setPixel(
  img: RgbImage, x: number, y: number, rgb: [number, number, number],
): void {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  const o = (y * img.width + x) * 3;
  img.pixels[o] = rgb[0];
  img.pixels[o + 1] = rgb[1];
  img.pixels[o + 2] = rgb[2];
}

export function encodePng(img: RgbImage): Buffer {
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(img.width, 0);
  ihdr.writeUInt32BE(img.height, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 2; // color type: truecolor RGB
  ihdr[10] = 0; // compression
  ihdr[11] = 0; // filter method
  ihdr[12] = 0; // no interlace

  const stride = img.width * 3;
  const raw = Buffer.alloc((stride + 1) * img.height);
  for (let y = 0; y < img.height; y++) {
    raw[y * (stride + 1)] = 0; // filter type 0 (none)
    raw.set(img.pixels.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
  }
  return Buffer.concat([
    SIGNATURE,
    chunk("IHDR", ihdr),
    chunk("IDAT", deflateSync(raw, { level: 9 })),
    chunk("IEND", Buffer.alloc(0)),
  ]);
}

/** Parse width/height back out of an encoded PNG (for tests and sanity checks). */
export function pngSize(buffer: Buffer): { width: number; height: number } {
  if (!buffer.subarray(0, 8).equals(SIGNATURE)) {
    throw new Error("not a PNG (bad signature)");
  }
  return { width: buffer.readUInt32BE(16), height: buffer.readUInt32BE(20) };
}
