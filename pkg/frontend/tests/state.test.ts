import { describe, expect, it } from 'vitest';

import {
  applyCodecDefaults,
  applyMetricDefaults,
  defaultDelta,
  initialState,
  pushHistory,
  validate,
  validateForEstimate,
} from '../src/state';
import { sampleSnapshot, TEST_META } from './helpers';

function validState() {
  return {
    ...initialState(),
    imageId: 'img1',
    imageKind: 'pgm' as const,
    target: 40,
    delta: 0.1,
    paramMin: 1,
    paramMax: 64,
  };
}

describe('validation', () => {
  it('accepts a complete selection', () => {
    expect(validate(validState(), TEST_META)).toEqual({ ok: true, problems: [] });
  });

  it('submit stays disabled until an image is uploaded', () => {
    const v = validate({ ...validState(), imageId: null }, TEST_META);
    expect(v.ok).toBe(false);
    expect(v.problems.join(' ')).toContain('image');
  });

  it('rejects a target outside the metric range', () => {
    const v = validate({ ...validState(), target: 250 }, TEST_META);
    expect(v.ok).toBe(false);
    expect(v.problems.join(' ')).toContain('outside');
  });

  it('requires a strictly positive tolerance', () => {
    expect(validate({ ...validState(), delta: 0 }, TEST_META).ok).toBe(false);
    expect(validate({ ...validState(), delta: -1 }, TEST_META).ok).toBe(false);
  });

  it('requires an ordered positive parameter range', () => {
    expect(validate({ ...validState(), paramMin: 10, paramMax: 2 }, TEST_META).ok).toBe(false);
    expect(validate({ ...validState(), paramMin: 0, paramMax: 2 }, TEST_META).ok).toBe(false);
  });

  it('estimate needs no target', () => {
    const v = validateForEstimate({ ...validState(), target: null }, TEST_META);
    expect(v.ok).toBe(true);
  });
});

describe('defaults', () => {
  it('prefills 0.1 dB for decibel metrics and 0.005 for unitless', () => {
    expect(defaultDelta(TEST_META, 'psnr')).toBe(0.1);
    expect(defaultDelta(TEST_META, 'msssim')).toBe(0.005);
  });

  it('applies codec range and metric tolerance defaults', () => {
    let s = validState();
    s = applyCodecDefaults({ ...s, paramMin: null, paramMax: null }, TEST_META);
    s = applyMetricDefaults({ ...s, delta: null }, TEST_META);
    expect(s.paramMin).toBe(1);
    expect(s.paramMax).toBe(64);
    expect(s.delta).toBe(0.1);
  });
});

describe('history', () => {
  it('keeps runs sorted by submission time', () => {
    let s = validState();
    s = pushHistory(s, sampleSnapshot({ job_id: 'b', submitted_at: 2000 }));
    s = pushHistory(s, sampleSnapshot({ job_id: 'a', submitted_at: 1000 }));
    expect(s.history.map((h) => h.job_id)).toEqual(['a', 'b']);
  });
});
