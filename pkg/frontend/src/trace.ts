/** Iteration trace model: probe points accumulated from poll snapshots and
 * turned into SVG polyline coordinates. */

import { ProbeEntry } from './api';

export interface TracePoint {
  index: number;
  param: number;
  value: number;
  phase: 'endpoint' | 'search';
}

export class Trace {
  private points: TracePoint[] = [];

  /** Replace with the probes from the latest snapshot (poll history only
   * ever grows, so the trace never loses points). */
  update(probes: ProbeEntry[]): void {
    if (probes.length < this.points.length) return;
    this.points = probes.map((p, i) => ({
      index: i,
      param: p.param,
      value: p.value,
      phase: p.phase,
    }));
  }

  get length(): number {
    return this.points.length;
  }

  all(): TracePoint[] {
    return [...this.points];
  }

  /** Map metric values to an SVG polyline over the given box; endpoint
   * probes are included so the operator sees the feasibility span. */
  polyline(width: number, height: number, pad = 4): string {
    if (this.points.length === 0) return '';
    const values = this.points.map((p) => p.value);
    let lo = Math.min(...values);
    let hi = Math.max(...values);
    if (hi === lo) {
      lo -= 1;
      hi += 1;
    }
    const n = this.points.length;
    const xStep = n > 1 ? (width - 2 * pad) / (n - 1) : 0;
    return this.points
      .map((p, i) => {
        const x = pad + i * xStep;
        const y = pad + (hi - p.value) * ((height - 2 * pad) / (hi - lo));
        return `${x.toFixed(1)},${y.toFixed(1)}`;
      })
      .join(' ');
  }
}
