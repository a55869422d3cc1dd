/** Shared pan/zoom state for the side-by-side panes. One Viewport instance
 * drives every registered pane, so zooming or dragging any canvas moves all
 * of them to the same region — that is the whole comparison contract. */

export interface ViewTransform {
  /** CSS pixels per image pixel */
  scale: number;
  /** image-space coordinate at the canvas origin */
  offsetX: number;
  offsetY: number;
}

export const MIN_SCALE = 0.125;
export const MAX_SCALE = 64;

export class Viewport {
  private transform: ViewTransform = { scale: 1, offsetX: 0, offsetY: 0 };
  private listeners: Array<(t: ViewTransform) => void> = [];

  get(): ViewTransform {
    return { ...this.transform };
  }

  subscribe(fn: (t: ViewTransform) => void): void {
    this.listeners.push(fn);
    fn(this.get());
  }

  private emit(): void {
    const t = this.get();
    for (const fn of this.listeners) fn(t);
  }

  reset(scale = 1): void {
    this.transform = { scale, offsetX: 0, offsetY: 0 };
    this.emit();
  }

  /** Fit an image into a pane, centering it. */
  fit(imageW: number, imageH: number, paneW: number, paneH: number): void {
    const scale = Math.min(paneW / imageW, paneH / imageH);
    this.transform = {
      scale,
      offsetX: (imageW - paneW / scale) / 2,
      offsetY: (imageH - paneH / scale) / 2,
    };
    this.emit();
  }

  /** Pan by a canvas-pixel delta (drag). */
  panBy(dxCss: number, dyCss: number): void {
    this.transform.offsetX -= dxCss / this.transform.scale;
    this.transform.offsetY -= dyCss / this.transform.scale;
    this.emit();
  }

  /** Zoom by a factor keeping the image point under (cssX, cssY) fixed. */
  zoomAt(factor: number, cssX: number, cssY: number): void {
    const t = this.transform;
    const next = clamp(t.scale * factor, MIN_SCALE, MAX_SCALE);
    const imgX = t.offsetX + cssX / t.scale;
    const imgY = t.offsetY + cssY / t.scale;
    this.transform = {
      scale: next,
      offsetX: imgX - cssX / next,
      offsetY: imgY - cssY / next,
    };
    this.emit();
  }

  /** Image-space point currently under a canvas point. */
  imagePoint(cssX: number, cssY: number): { x: number; y: number } {
    const t = this.transform;
    return { x: t.offsetX + cssX / t.scale, y: t.offsetY + cssY / t.scale };
  }
}

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(Math.max(v, lo), hi);
}
