import { describe, expect, it } from 'vitest';

import { Trace } from '../src/trace';

describe('Trace', () => {
  it('gains one point per new probe across polls', () => {
    const trace = new Trace();
    trace.update([{ phase: 'endpoint', param: 1, value: 59 }]);
    expect(trace.length).toBe(1);
    trace.update([
      { phase: 'endpoint', param: 1, value: 59 },
      { phase: 'endpoint', param: 50, value: 10 },
      { phase: 'search', param: 7.1, value: 52.9 },
    ]);
    expect(trace.length).toBe(3);
    // a stale snapshot (shorter history) never shrinks the trace
    trace.update([{ phase: 'endpoint', param: 1, value: 59 }]);
    expect(trace.length).toBe(3);
  });

  it('emits one polyline vertex per probe inside the box', () => {
    const trace = new Trace();
    trace.update([
      { phase: 'endpoint', param: 1, value: 59 },
      { phase: 'endpoint', param: 50, value: 10 },
      { phase: 'search', param: 20, value: 40 },
    ]);
    const points = trace.polyline(240, 80).split(' ');
    expect(points).toHaveLength(3);
    for (const pair of points) {
      const [x, y] = pair.split(',').map(Number);
      expect(x).toBeGreaterThanOrEqual(0);
      expect(x).toBeLessThanOrEqual(240);
      expect(y).toBeGreaterThanOrEqual(0);
      expect(y).toBeLessThanOrEqual(80);
    }
  });

  it('handles a flat series without dividing by zero', () => {
    const trace = new Trace();
    trace.update([
      { phase: 'search', param: 10, value: 40 },
      { phase: 'search', param: 11, value: 40 },
    ]);
    expect(trace.polyline(100, 50)).toContain(',');
  });
});
