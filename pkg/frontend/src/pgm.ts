/** Binary PGM (P5) parsing for canvas display; the service sends all
 * images in this format. */

export interface PgmImage {
  width: number;
  height: number;
  maxval: number;
  /** row-major samples, one per pixel */
  samples: Uint16Array;
}

export function parsePgm(buf: ArrayBuffer): PgmImage {
  const bytes = new Uint8Array(buf);
  if (bytes[0] !== 0x50 || bytes[1] !== 0x35) {
    throw new Error('not a P5 PGM');
  }
  let pos = 2;
  const fields: number[] = [];
  while (fields.length < 3) {
    while (pos < bytes.length && isSpace(bytes[pos])) pos += 1;
    if (bytes[pos] === 0x23) {
      // comment line
      while (pos < bytes.length && bytes[pos] !== 0x0a) pos += 1;
      continue;
    }
    let start = pos;
    while (pos < bytes.length && !isSpace(bytes[pos])) pos += 1;
    const token = asciiSlice(bytes, start, pos);
    const value = Number(token);
    if (!Number.isInteger(value)) throw new Error(`bad PGM header token "${token}"`);
    fields.push(value);
  }
  pos += 1; // single whitespace after maxval
  const [width, height, maxval] = fields;
  if (maxval !== 255 && maxval !== 65535) {
    throw new Error(`unsupported maxval ${maxval}`);
  }
  const count = width * height;
  const samples = new Uint16Array(count);
  if (maxval === 255) {
    if (bytes.length - pos < count) throw new Error('truncated PGM payload');
    for (let i = 0; i < count; i += 1) samples[i] = bytes[pos + i];
  } else {
    if (bytes.length - pos < count * 2) throw new Error('truncated PGM payload');
    for (let i = 0; i < count; i += 1) {
      samples[i] = (bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1];
    }
  }
  return { width, height, maxval, samples };
}

function isSpace(b: number): boolean {
  return b === 0x20 || b === 0x0a || b === 0x0d || b === 0x09;
}

function asciiSlice(bytes: Uint8Array, start: number, end: number): string {
  let out = '';
  for (let i = start; i < end; i += 1) out += String.fromCharCode(bytes[i]);
  return out;
}
