/** The console's eight sections: coder list, metric list, target
 * quality, tolerance, parameter range, control buttons, the side-by-side
 * image panes and the quantitative results. buildLayout constructs the DOM
 * and hands back typed references; wiring lives in main.ts. */

import { JobSnapshot, SearchReport } from './api';

export interface Layout {
  root: HTMLElement;
  codecSelect: HTMLSelectElement;
  metricSelect: HTMLSelectElement;
  targetInput: HTMLInputElement;
  deltaInput: HTMLInputElement;
  paramMinInput: HTMLInputElement;
  paramMaxInput: HTMLInputElement;
  methodSelect: HTMLSelectElement;
  clampCheckbox: HTMLInputElement;
  homomorphicCheckbox: HTMLInputElement;
  fileInput: HTMLInputElement;
  descriptorInput: HTMLInputElement;
  startButton: HTMLButtonElement;
  estimateButton: HTMLButtonElement;
  cubeButton: HTMLButtonElement;
  banner: HTMLElement;
  imageInfo: HTMLElement;
  panes: {
    original: HTMLCanvasElement;
    decoded: HTMLCanvasElement;
  };
  diffToggle: HTMLInputElement;
  stretchNote: HTMLElement;
  maxDiffReadout: HTMLElement;
  traceSvg: SVGSVGElement;
  tracePolyline: SVGPolylineElement;
  results: HTMLElement;
  historyTable: HTMLTableSectionElement;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = '',
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text) node.textContent = text;
  return node;
}

function block(id: string, title: string): HTMLElement {
  const section = el('section', { class: 'block', 'data-block': id });
  section.appendChild(el('h2', {}, title));
  return section;
}

export function buildLayout(doc: Document = document): Layout {
  const root = doc.createElement('main');
  root.className = 'console';

  // 1. coders' list
  const coders = block('coders', 'Coder');
  const codecSelect = el('select', { id: 'codec' });
  coders.appendChild(codecSelect);
  // 2. metrics' list
  const metrics = block('metrics', 'Metric');
  const metricSelect = el('select', { id: 'metric' });
  metrics.appendChild(metricSelect);
  // 3. target quality
  const quality = block('quality', 'Quality target');
  const targetInput = el('input', { id: 'target', type: 'number', step: 'any' });
  quality.appendChild(targetInput);
  // 4. tolerance
  const accuracy = block('accuracy', 'Quality accuracy Δ');
  const deltaInput = el('input', {
    id: 'delta', type: 'number', step: 'any', min: '0',
  });
  accuracy.appendChild(deltaInput);
  // 5. parameter range
  const range = block('range', 'Parameter range');
  const paramMinInput = el('input', { id: 'param-min', type: 'number', step: 'any' });
  const paramMaxInput = el('input', { id: 'param-max', type: 'number', step: 'any' });
  range.appendChild(paramMinInput);
  range.appendChild(paramMaxInput);
  // 6. control buttons
  const controls = block('controls', 'Control');
  const fileInput = el('input', { id: 'file', type: 'file', accept: '.pgm,.raw' });
  const descriptorInput = el('input', { id: 'descriptor', type: 'file', accept: '.desc,.txt' });
  const methodSelect = el('select', { id: 'method' });
  for (const m of ['interp', 'bisect']) {
    methodSelect.appendChild(el('option', { value: m }, m));
  }
  const clampCheckbox = el('input', { id: 'clamp', type: 'checkbox' });
  const homomorphicCheckbox = el('input', { id: 'homomorphic', type: 'checkbox' });
  const startButton = el('button', { id: 'start', disabled: '' }, 'Start');
  const estimateButton = el('button', { id: 'estimate', disabled: '' }, 'Min/Max Estimate');
  const cubeButton = el('button', { id: 'start-cube', disabled: '' }, 'Start hyperspectral');
  const imageInfo = el('span', { id: 'image-info', class: 'image-info' });
  for (const node of [
    fileInput, descriptorInput, imageInfo, methodSelect,
    labelled(doc, clampCheckbox, 'clamp'),
    labelled(doc, homomorphicCheckbox, 'homomorphic'),
    startButton, estimateButton, cubeButton,
  ]) {
    controls.appendChild(node);
  }
  // banner for errors / feasibility info
  const banner = el('div', { id: 'banner', class: 'banner', hidden: '' });
  // 7. side-by-side panes
  const images = block('images', 'Input / output');
  const paneRow = el('div', { class: 'panes' });
  const original = el('canvas', { id: 'pane-original', width: '384', height: '384' });
  const decoded = el('canvas', { id: 'pane-decoded', width: '384', height: '384' });
  for (const [canvas, caption] of [
    [original, 'original'],
    [decoded, 'decoded'],
  ] as const) {
    const fig = el('figure');
    fig.appendChild(canvas);
    fig.appendChild(el('figcaption', {}, caption));
    paneRow.appendChild(fig);
  }
  images.appendChild(paneRow);
  const diffToggle = el('input', { id: 'diff-toggle', type: 'checkbox' });
  images.appendChild(labelled(doc, diffToggle, 'show difference'));
  const stretchNote = el('span', { id: 'stretch-note', class: 'note' });
  const maxDiffReadout = el('span', { id: 'max-diff', class: 'note' });
  images.appendChild(stretchNote);
  images.appendChild(maxDiffReadout);
  // 8. results
  const results = block('results', 'Results');
  const resultsBody = el('div', { id: 'result-values', class: 'result-values' });
  results.appendChild(resultsBody);
  const traceSvg = doc.createElementNS('http://www.w3.org/2000/svg', 'svg');
  traceSvg.setAttribute('id', 'trace');
  traceSvg.setAttribute('viewBox', '0 0 240 80');
  const tracePolyline = doc.createElementNS(
    'http://www.w3.org/2000/svg', 'polyline',
  ) as SVGPolylineElement;
  tracePolyline.setAttribute('fill', 'none');
  tracePolyline.setAttribute('stroke', 'currentColor');
  traceSvg.appendChild(tracePolyline);
  results.appendChild(traceSvg);
  const table = el('table', { id: 'history' });
  const head = el('thead');
  const headRow = el('tr');
  for (const h of ['#', 'metric', 'target', 'achieved', 'iterations', 'param', 'CR', 'bpp']) {
    headRow.appendChild(el('th', {}, h));
  }
  head.appendChild(headRow);
  const historyTable = el('tbody');
  table.appendChild(head);
  table.appendChild(historyTable);
  results.appendChild(table);

  for (const section of [coders, metrics, quality, accuracy, range, controls]) {
    root.appendChild(section);
  }
  root.appendChild(banner);
  root.appendChild(images);
  root.appendChild(results);

  return {
    root,
    codecSelect,
    metricSelect,
    targetInput,
    deltaInput,
    paramMinInput,
    paramMaxInput,
    methodSelect,
    clampCheckbox,
    homomorphicCheckbox,
    fileInput,
    descriptorInput,
    startButton,
    estimateButton,
    cubeButton,
    banner,
    imageInfo,
    panes: {
      original: original as HTMLCanvasElement,
      decoded: decoded as HTMLCanvasElement,
    },
    diffToggle,
    stretchNote,
    maxDiffReadout,
    traceSvg,
    tracePolyline,
    results: resultsBody,
    historyTable,
  };
}

function labelled(doc: Document, input: HTMLElement, text: string): HTMLElement {
  const label = doc.createElement('label');
  label.appendChild(input);
  label.appendChild(doc.createTextNode(` ${text}`));
  return label;
}

export function populateSelect(select: HTMLSelectElement, ids: string[]): void {
  select.textContent = '';
  for (const id of ids) {
    const option = document.createElement('option');
    option.value = id;
    option.textContent = id;
    select.appendChild(option);
  }
}

/** Render the quantitative results block. Values are printed verbatim from
 * the service report — the UI never computes or reformats metric numbers. */
export function renderResults(container: HTMLElement, report: SearchReport): void {
  container.textContent = '';
  const rows: Array<[string, string]> = [
    ['status', report.status],
    ['achieved', String(report.achieved)],
    ['iterations', String(report.iterations)],
    ['final parameter', String(report.final_param.value)],
    ['CR', String(report.cr)],
    ['bpp', String(report.bpp)],
  ];
  for (const [key, value] of rows) {
    const div = document.createElement('div');
    const k = document.createElement('span');
    k.className = 'key';
    k.textContent = key;
    const v = document.createElement('span');
    v.className = 'value';
    v.setAttribute('data-key', key);
    v.textContent = value;
    div.appendChild(k);
    div.appendChild(v);
    container.appendChild(div);
  }
}

export function renderHistoryRow(tbody: HTMLTableSectionElement, snap: JobSnapshot): void {
  const report = snap.report as SearchReport | null;
  if (!report) return;
  const tr = document.createElement('tr');
  const cells = [
    String(tbody.children.length + 1),
    report.metric_id,
    String(report.target),
    String(report.achieved),
    String(report.iterations),
    String(report.final_param.value),
    String(report.cr),
    String(report.bpp),
  ];
  for (const text of cells) {
    const td = document.createElement('td');
    td.textContent = text;
    tr.appendChild(td);
  }
  tbody.appendChild(tr);
}

export function showBanner(banner: HTMLElement, message: string, kind: 'error' | 'info'): void {
  banner.textContent = message;
  banner.className = `banner banner-${kind}`;
  banner.removeAttribute('hidden');
}

export function hideBanner(banner: HTMLElement): void {
  banner.setAttribute('hidden', '');
}

/** Infeasible jobs surface the achievable interval so the operator can
 * re-target. */
export function bannerForFailure(snap: JobSnapshot): string {
  if (snap.achievable_interval) {
    const [lo, hi] = snap.achievable_interval;
    return `target ${snap.spec.target} is not achievable; the reachable interval is [${lo}, ${hi}]`;
  }
  return snap.error ?? 'job failed';
}
