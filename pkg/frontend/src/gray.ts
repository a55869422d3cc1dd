/** Display mapping for grayscale samples. 16-bit data is stretched to the
 * 8-bit canvas by a linear min/max stretch; the bounds are reported so the
 * UI can show them instead of silently clipping dynamic range. */

import { PgmImage } from './pgm';

export interface Stretch {
  lo: number;
  hi: number;
}

export function stretchBounds(img: PgmImage): Stretch {
  if (img.maxval === 255) return { lo: 0, hi: 255 };
  let lo = img.samples[0];
  let hi = img.samples[0];
  for (const v of img.samples) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (hi === lo) hi = lo + 1; // flat image: map to a single gray
  return { lo, hi };
}

/** Map samples to 8-bit display values using the given stretch. */
export function toDisplayBytes(img: PgmImage, stretch: Stretch): Uint8ClampedArray<ArrayBuffer> {
  const out = new Uint8ClampedArray(img.samples.length);
  if (img.maxval === 255) {
    out.set(img.samples);
    return out;
  }
  const scale = 255 / (stretch.hi - stretch.lo);
  for (let i = 0; i < img.samples.length; i += 1) {
    out[i] = Math.round((img.samples[i] - stretch.lo) * scale);
  }
  return out;
}

/** Expand display bytes to RGBA for ImageData. */
export function toRgba(gray: Uint8ClampedArray): Uint8ClampedArray<ArrayBuffer> {
  const out = new Uint8ClampedArray(gray.length * 4);
  for (let i = 0; i < gray.length; i += 1) {
    const v = gray[i];
    const j = i * 4;
    out[j] = v;
    out[j + 1] = v;
    out[j + 2] = v;
    out[j + 3] = 255;
  }
  return out;
}
