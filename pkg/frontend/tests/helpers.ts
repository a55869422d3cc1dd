import { JobSnapshot, Meta, SearchReport } from '../src/api';

export const TEST_META: Meta = {
  codecs: {
    bdct: {
      param_kind: 'quantization_step',
      param_min: 1,
      param_max: 64,
      quality_direction: 'metric_decreases_with_param',
    },
    'bdct-csf': {
      param_kind: 'quantization_step',
      param_min: 1,
      param_max: 64,
      quality_direction: 'metric_decreases_with_param',
    },
  },
  metrics: {
    psnr: { units: 'decibels', lo: 0, hi: 100, default_tolerance: 0.1 },
    msssim: { units: 'unitless', lo: 0, hi: 1, default_tolerance: 0.005 },
  },
};

export function sampleReport(overrides: Partial<SearchReport> = {}): SearchReport {
  return {
    status: 'converged',
    achieved: 39.98310232,
    iterations: 3,
    final_param: { kind: 'quantization_step', value: 23.681519 },
    cr: 7.4123001,
    bpp: 1.0792331,
    target: 40,
    delta: 0.1,
    metric_id: 'psnr',
    codec_id: 'bdct',
    achievable_interval: [27.51, 58.95],
    history: [
      { param: 14.3, value: 38.52 },
      { param: 20.1, value: 40.61 },
      { param: 23.68, value: 39.98 },
    ],
    ...overrides,
  };
}

export function sampleSnapshot(overrides: Partial<JobSnapshot> = {}): JobSnapshot {
  return {
    job_id: 'abc123',
    state: 'done',
    submitted_at: 1000,
    spec: {
      image_id: 'img1',
      kind: 'search',
      codec_id: 'bdct',
      metric_id: 'psnr',
      target: 40,
      method: 'interp',
    },
    probes: [],
    report: sampleReport(),
    error: null,
    achievable_interval: null,
    diff_max: 4,
    ...overrides,
  };
}

/** Minimal PGM bytes for parser tests. */
export function pgmBytes(
  width: number,
  height: number,
  maxval: number,
  samples: number[],
): ArrayBuffer {
  const header = `P5\n${width} ${height}\n${maxval}\n`;
  const headBytes = [...header].map((c) => c.charCodeAt(0));
  const body: number[] = [];
  for (const s of samples) {
    if (maxval === 255) body.push(s);
    else body.push(s >> 8, s & 0xff);
  }
  return new Uint8Array([...headBytes, ...body]).buffer;
}
