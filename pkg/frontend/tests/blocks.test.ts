// @vitest-environment happy-dom
import { describe, expect, it } from 'vitest';

import {
  bannerForFailure,
  buildLayout,
  populateSelect,
  renderHistoryRow,
  renderResults,
  showBanner,
} from '../src/blocks';
import { sampleReport, sampleSnapshot } from './helpers';

describe('console sections', () => {
  it('all eight sections are present', () => {
    const layout = buildLayout();
    document.body.appendChild(layout.root);
    const ids = [...document.querySelectorAll('[data-block]')].map(
      (el) => el.getAttribute('data-block'),
    );
    expect(ids).toEqual([
      'coders', 'metrics', 'quality', 'accuracy', 'range', 'controls',
      'images', 'results',
    ]);
    // the three control buttons of the sixth block
    expect(layout.startButton.textContent).toBe('Start');
    expect(layout.estimateButton.textContent).toBe('Min/Max Estimate');
    expect(layout.cubeButton.textContent).toBe('Start hyperspectral');
    // the seventh block holds both panes
    expect(layout.panes.original.id).toBe('pane-original');
    expect(layout.panes.decoded.id).toBe('pane-decoded');
    document.body.removeChild(layout.root);
  });

  it('buttons start out disabled until selections validate', () => {
    const layout = buildLayout();
    expect(layout.startButton.disabled).toBe(true);
    expect(layout.estimateButton.disabled).toBe(true);
    expect(layout.cubeButton.disabled).toBe(true);
  });

  it('populateSelect lists the registry ids', () => {
    const layout = buildLayout();
    populateSelect(layout.codecSelect, ['bdct', 'bdct-csf']);
    expect([...layout.codecSelect.options].map((o) => o.value)).toEqual([
      'bdct', 'bdct-csf',
    ]);
  });
});

describe('results rendering', () => {
  it('displays service-report numbers verbatim', () => {
    const layout = buildLayout();
    const report = sampleReport();
    renderResults(layout.results, report);
    const byKey = (key: string) =>
      layout.results.querySelector(`[data-key="${key}"]`)?.textContent;
    expect(byKey('achieved')).toBe(String(report.achieved));
    expect(byKey('iterations')).toBe(String(report.iterations));
    expect(byKey('final parameter')).toBe(String(report.final_param.value));
    expect(byKey('CR')).toBe(String(report.cr));
    expect(byKey('bpp')).toBe(String(report.bpp));
  });

  it('history rows carry the report values in submission order', () => {
    const layout = buildLayout();
    renderHistoryRow(layout.historyTable, sampleSnapshot({ submitted_at: 1 }));
    renderHistoryRow(
      layout.historyTable,
      sampleSnapshot({
        submitted_at: 2,
        report: sampleReport({ achieved: 42.0051, cr: 11.51 }),
      }),
    );
    const rows = [...layout.historyTable.querySelectorAll('tr')];
    expect(rows).toHaveLength(2);
    const cells = (row: Element) => [...row.querySelectorAll('td')].map((c) => c.textContent);
    expect(cells(rows[0])[3]).toBe(String(sampleReport().achieved));
    expect(cells(rows[1])[3]).toBe('42.0051');
    expect(cells(rows[1])[6]).toBe('11.51');
  });
});

describe('failure banner', () => {
  it('surfaces the achievable interval for infeasible targets', () => {
    const snap = sampleSnapshot({
      state: 'failed',
      report: null,
      error: 'target 5 is outside the achievable interval',
      achievable_interval: [10.0, 59.0],
    });
    const message = bannerForFailure(snap);
    expect(message).toContain('[10, 59]');
    expect(message).toContain('5');
  });

  it('falls back to the error text', () => {
    const snap = sampleSnapshot({ state: 'failed', report: null, error: 'boom' });
    expect(bannerForFailure(snap)).toBe('boom');
  });

  it('showBanner unhides and classifies', () => {
    const layout = buildLayout();
    showBanner(layout.banner, 'hello', 'info');
    expect(layout.banner.hasAttribute('hidden')).toBe(false);
    expect(layout.banner.className).toContain('banner-info');
  });
});
