/** Pointer-event capture: raw move events in, downsampled polylines out. */

export interface PointerSample {
  x: number;
  y: number;
}

export const MIN_POINT_SPACING = 2;

/**
 * Accumulates one stroke between pointerdown and pointerup.
 *
 * Samples closer than MIN_POINT_SPACING canvas pixels to the last kept
 * point are dropped, so a slow 200-event drag over 100 px stores at most
 * ~50 points. The final sample is always kept so the stroke ends where
 * the pointer lifted.
 */
export class StrokeCapture {
  private points: [number, number][] = [];
  private pending: PointerSample | null = null;
  private active = false;

  get isActive(): boolean {
    return this.active;
  }

  begin(sample: PointerSample): void {
    this.points = [[sample.x, sample.y]];
    this.pending = null;
    this.active = true;
  }

  move(sample: PointerSample): void {
    if (!this.active) return;
    const last = this.points[this.points.length - 1]!;
    const dx = sample.x - last[0];
    const dy = sample.y - last[1];
    if (Math.hypot(dx, dy) >= MIN_POINT_SPACING) {
      this.points.push([sample.x, sample.y]);
      this.pending = null;
    } else {
      this.pending = sample;
    }
  }

  /** Ends the stroke; a click without a drag returns null. */
  end(): [number, number][] | null {
    if (!this.active) return null;
    this.active = false;
    const pts = this.points;
    this.points = [];
    if (this.pending !== null) {
      const last = pts[pts.length - 1]!;
      if (this.pending.x !== last[0] || this.pending.y !== last[1]) {
        pts.push([this.pending.x, this.pending.y]);
      }
      this.pending = null;
    }
    return pts.length >= 2 ? pts : null;
  }

  /** Points so far, for drawing the in-progress stroke. */
  preview(): readonly [number, number][] {
    return this.points;
  }
}
