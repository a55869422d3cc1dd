/** Session state for the console: current selections plus run history.
 * Submit stays disabled until every selection validates. */

import { JobSnapshot, Meta } from './api';

export interface SessionState {
  imageId: string | null;
  imageKind: 'pgm' | 'raw' | null;
  codecId: string;
  metricId: string;
  target: number | null;
  delta: number | null;
  paramMin: number | null;
  paramMax: number | null;
  method: 'bisect' | 'interp';
  clamp: boolean;
  homomorphic: boolean;
  history: JobSnapshot[];
}

export function initialState(): SessionState {
  return {
    imageId: null,
    imageKind: null,
    codecId: 'bdct',
    metricId: 'psnr',
    target: null,
    delta: null,
    paramMin: null,
    paramMax: null,
    method: 'interp',
    clamp: false,
    homomorphic: false,
    history: [],
  };
}

/** Default tolerance per the metric's units: 0.1 dB, 0.005 unitless. */
export function defaultDelta(meta: Meta, metricId: string): number {
  const info = meta.metrics[metricId];
  return info ? info.default_tolerance : 0.1;
}

export function applyMetricDefaults(state: SessionState, meta: Meta): SessionState {
  return { ...state, delta: defaultDelta(meta, state.metricId) };
}

export function applyCodecDefaults(state: SessionState, meta: Meta): SessionState {
  const info = meta.codecs[state.codecId];
  if (!info) return state;
  return { ...state, paramMin: info.param_min, paramMax: info.param_max };
}

export interface ValidationResult {
  ok: boolean;
  problems: string[];
}

export function validate(state: SessionState, meta: Meta): ValidationResult {
  const problems: string[] = [];
  if (!state.imageId) problems.push('no image uploaded');
  if (!meta.codecs[state.codecId]) problems.push(`unknown codec ${state.codecId}`);
  const metric = meta.metrics[state.metricId];
  if (!metric) problems.push(`unknown metric ${state.metricId}`);
  if (state.target === null || Number.isNaN(state.target)) {
    problems.push('target is required');
  } else if (metric && (state.target < metric.lo || state.target > metric.hi)) {
    problems.push(`target outside [${metric.lo}, ${metric.hi}]`);
  }
  if (state.delta === null || Number.isNaN(state.delta) || state.delta <= 0) {
    problems.push('tolerance must be > 0');
  }
  if (
    state.paramMin === null ||
    state.paramMax === null ||
    !(state.paramMin > 0) ||
    !(state.paramMin < state.paramMax)
  ) {
    problems.push('parameter range needs 0 < min < max');
  }
  return { ok: problems.length === 0, problems };
}

/** Estimate runs need everything but a target. */
export function validateForEstimate(state: SessionState, meta: Meta): ValidationResult {
  const probe = { ...state, target: metricMidpoint(meta, state.metricId), delta: 1 };
  return validate(probe, meta);
}

function metricMidpoint(meta: Meta, metricId: string): number {
  const m = meta.metrics[metricId];
  return m ? (m.lo + m.hi) / 2 : 1;
}

export function pushHistory(state: SessionState, snap: JobSnapshot): SessionState {
  const history = [...state.history, snap].sort((a, b) => a.submitted_at - b.submitted_at);
  return { ...state, history };
}
