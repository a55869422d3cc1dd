/** Console wiring: meta loading, uploads, job submission and tracking,
 * canvas rendering with a shared viewport. */

import { ApiClient, Meta, SearchReport, trackJob } from './api';
import {
  bannerForFailure,
  buildLayout,
  hideBanner,
  Layout,
  populateSelect,
  renderHistoryRow,
  renderResults,
  showBanner,
} from './blocks';
import { PgmImage, parsePgm } from './pgm';
import { Stretch, stretchBounds, toDisplayBytes, toRgba } from './gray';
import {
  applyCodecDefaults,
  applyMetricDefaults,
  initialState,
  pushHistory,
  SessionState,
  validate,
  validateForEstimate,
} from './state';
import { Trace } from './trace';
import { Viewport } from './viewport';

class Pane {
  private image: PgmImage | null = null;
  private rgba: ImageData | null = null;

  constructor(
    readonly canvas: HTMLCanvasElement,
    private readonly viewport: Viewport,
  ) {
    viewport.subscribe(() => this.draw());
  }

  setImage(img: PgmImage | null, stretch: Stretch | null): void {
    this.image = img;
    if (img) {
      const bytes = toDisplayBytes(img, stretch ?? stretchBounds(img));
      this.rgba = new ImageData(toRgba(bytes), img.width, img.height);
    } else {
      this.rgba = null;
    }
    this.draw();
  }

  private draw(): void {
    const ctx = this.canvas.getContext('2d');
    if (!ctx) return;
    ctx.imageSmoothingEnabled = false;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    if (!this.image || !this.rgba) return;
    const t = this.viewport.get();
    // draw the source ImageData once, then blit with the shared transform
    const off = offscreen(this.image.width, this.image.height);
    const octx = off.getContext('2d');
    if (!octx) return;
    octx.putImageData(this.rgba, 0, 0);
    ctx.save();
    ctx.scale(t.scale, t.scale);
    ctx.drawImage(off, -t.offsetX, -t.offsetY);
    ctx.restore();
  }
}

function offscreen(w: number, h: number): HTMLCanvasElement {
  const c = document.createElement('canvas');
  c.width = w;
  c.height = h;
  return c;
}

function attachPaneEvents(layout: Layout, viewport: Viewport): void {
  for (const canvas of [layout.panes.original, layout.panes.decoded]) {
    let dragging = false;
    let lastX = 0;
    let lastY = 0;
    canvas.addEventListener('pointerdown', (e) => {
      dragging = true;
      lastX = e.offsetX;
      lastY = e.offsetY;
      canvas.setPointerCapture(e.pointerId);
    });
    canvas.addEventListener('pointermove', (e) => {
      if (!dragging) return;
      viewport.panBy(e.offsetX - lastX, e.offsetY - lastY);
      lastX = e.offsetX;
      lastY = e.offsetY;
    });
    canvas.addEventListener('pointerup', () => {
      dragging = false;
    });
    canvas.addEventListener('wheel', (e) => {
      e.preventDefault();
      viewport.zoomAt(e.deltaY < 0 ? 1.25 : 0.8, e.offsetX, e.offsetY);
    });
  }
}

export function start(root: HTMLElement, api = new ApiClient()): void {
  const layout = buildLayout();
  root.appendChild(layout.root);
  const viewport = new Viewport();
  const originalPane = new Pane(layout.panes.original, viewport);
  const decodedPane = new Pane(layout.panes.decoded, viewport);
  attachPaneEvents(layout, viewport);

  let meta: Meta | null = null;
  let state: SessionState = initialState();
  let decodedBytes: ArrayBuffer | null = null;
  let diffBytes: ArrayBuffer | null = null;
  const trace = new Trace();

  const refreshButtons = (): void => {
    if (!meta) return;
    const v = validate(state, meta);
    layout.startButton.disabled = !v.ok;
    layout.cubeButton.disabled = !v.ok || state.imageKind !== 'raw';
    layout.estimateButton.disabled = !validateForEstimate(state, meta).ok;
    layout.startButton.title = v.problems.join('; ');
  };

  const readForm = (): void => {
    state = {
      ...state,
      codecId: layout.codecSelect.value,
      metricId: layout.metricSelect.value,
      target: numberOrNull(layout.targetInput.value),
      delta: numberOrNull(layout.deltaInput.value),
      paramMin: numberOrNull(layout.paramMinInput.value),
      paramMax: numberOrNull(layout.paramMaxInput.value),
      method: layout.methodSelect.value as 'interp' | 'bisect',
      clamp: layout.clampCheckbox.checked,
      homomorphic: layout.homomorphicCheckbox.checked,
    };
    refreshButtons();
  };

  const applyDefaults = (): void => {
    if (!meta) return;
    state = applyMetricDefaults(applyCodecDefaults(state, meta), meta);
    layout.deltaInput.value = String(state.delta ?? '');
    layout.paramMinInput.value = String(state.paramMin ?? '');
    layout.paramMaxInput.value = String(state.paramMax ?? '');
  };

  void api.meta().then((m) => {
    meta = m;
    populateSelect(layout.codecSelect, Object.keys(m.codecs));
    populateSelect(layout.metricSelect, Object.keys(m.metrics));
    layout.codecSelect.value = state.codecId in m.codecs ? state.codecId : layout.codecSelect.value;
    layout.metricSelect.value = state.metricId in m.metrics ? state.metricId : layout.metricSelect.value;
    applyDefaults();
    readForm();
  });

  layout.codecSelect.addEventListener('change', () => {
    readForm();
    applyDefaults();
    readForm();
  });
  layout.metricSelect.addEventListener('change', () => {
    readForm();
    applyDefaults();
    readForm();
  });
  for (const input of [
    layout.targetInput, layout.deltaInput, layout.paramMinInput,
    layout.paramMaxInput, layout.methodSelect, layout.clampCheckbox,
    layout.homomorphicCheckbox,
  ]) {
    input.addEventListener('input', readForm);
    input.addEventListener('change', readForm);
  }

  layout.fileInput.addEventListener('change', () => {
    const file = layout.fileInput.files?.[0];
    if (!file) return;
    const descriptor = layout.descriptorInput.files?.[0];
    void api
      .uploadImage(file, descriptor ?? undefined)
      .then(async (info) => {
        state = { ...state, imageId: info.image_id, imageKind: info.kind };
        layout.imageInfo.textContent =
          `${info.width}x${info.height} ${info.bit_depth}-bit` +
          (info.bands > 1 ? ` ${info.bands} bands` : '');
        hideBanner(layout.banner);
        const buf = await fetchImage(api, info.image_id);
        const img = parsePgm(buf);
        const stretch = stretchBounds(img);
        originalPane.setImage(img, stretch);
        decodedPane.setImage(null, null);
        layout.stretchNote.textContent =
          img.maxval > 255 ? `display stretch [${stretch.lo}, ${stretch.hi}]` : '';
        viewport.fit(img.width, img.height, layout.panes.original.width,
                     layout.panes.original.height);
        refreshButtons();
      })
      .catch((err: Error) => showBanner(layout.banner, err.message, 'error'));
  });

  const runJob = (kind: 'search' | 'estimate' | 'cube'): void => {
    if (!state.imageId) return;
    hideBanner(layout.banner);
    trace.update([]);
    layout.tracePolyline.setAttribute('points', '');
    const spec = {
      image_id: state.imageId,
      kind,
      codec_id: state.codecId,
      metric_id: state.metricId,
      target: kind === 'estimate' ? undefined : state.target ?? undefined,
      delta: kind === 'estimate' ? undefined : state.delta ?? undefined,
      param_min: state.paramMin ?? undefined,
      param_max: state.paramMax ?? undefined,
      method: state.method,
      clamp: state.clamp,
      homomorphic: state.homomorphic,
    };
    void api
      .submitJob(spec)
      .then((jobId) =>
        trackJob(api, jobId, (snap) => {
          trace.update(snap.probes);
          layout.tracePolyline.setAttribute('points', trace.polyline(240, 80));
        }),
      )
      .then(async (snap) => {
        if (snap.state === 'failed') {
          showBanner(layout.banner, bannerForFailure(snap), 'error');
          return;
        }
        state = pushHistory(state, snap);
        if (kind === 'estimate') {
          const rep = snap.report;
          const [lo, hi] = rep?.achievable_interval ?? [NaN, NaN];
          showBanner(
            layout.banner,
            `metric span: ${rep?.value_at_param_min} at param min, ` +
              `${rep?.value_at_param_max} at param max; achievable interval [${lo}, ${hi}]`,
            'info',
          );
          return;
        }
        renderResults(layout.results, snap.report as SearchReport);
        renderHistoryRow(layout.historyTable, snap);
        decodedBytes = await api.fetchArtifact(snap.job_id, 'decoded');
        diffBytes = await api.fetchArtifact(snap.job_id, 'diff');
        layout.maxDiffReadout.textContent = `max difference: ${snap.diff_max}`;
        showDecoded();
      })
      .catch((err: Error) => showBanner(layout.banner, err.message, 'error'));
  };

  const showDecoded = (): void => {
    const buf = layout.diffToggle.checked ? diffBytes : decodedBytes;
    if (!buf) return;
    decodedPane.setImage(parsePgm(buf), null);
  };
  layout.diffToggle.addEventListener('change', showDecoded);

  layout.startButton.addEventListener('click', () => runJob('search'));
  layout.estimateButton.addEventListener('click', () => runJob('estimate'));
  layout.cubeButton.addEventListener('click', () => runJob('cube'));
}

async function fetchImage(api: ApiClient, imageId: string): Promise<ArrayBuffer> {
  const res = await fetch(`/api/images/${imageId}`);
  if (!res.ok) throw new Error(`cannot fetch image ${imageId}`);
  return res.arrayBuffer();
}

function numberOrNull(text: string): number | null {
  if (text.trim() === '') return null;
  const v = Number(text);
  return Number.isFinite(v) ? v : null;
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  start(document.getElementById('app') as HTMLElement);
}
