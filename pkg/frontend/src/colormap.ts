/**
 * Diverging blue-white-red colormap shared by every field plate, so plates
 * from different runs are directly comparable on the default [-1, 1] scale.
 */

export type Rgb = [number, number, number];

const LOW: Rgb = [59, 76, 192]; // deep blue at the low end
const MID: Rgb = [255, 255, 255];
const HIGH: Rgb = [180, 4, 38]; // deep red at the high end

function lerp(a: Rgb, b: Rgb, t: number): Rgb {
  return [
    Math.round(a[0] + (b[0] - a[0]) * t),
    Math.round(a[1] + (b[1] - a[1]) * t),
    Math.round(a[2] + (b[2] - a[2]) * t),
  ];
}

export function diverging(value: number, min = -1, max = 1): Rgb {
  if (!(max > min)) {
    throw new Error(`bad color range [${min}, ${max}]`);
  }
  const t = Math.min(1, Math.max(0, (value - min) / (max - min)));
  return t < 0.5 ? lerp(LOW, MID, t * 2) : lerp(MID, HIGH, (t - 0.5) * 2);
}
