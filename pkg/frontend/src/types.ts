/** Shared wire types: the sketch JSON schema and the category table. */

export interface Category {
  id: number;
  name: string;
  color: string;
}

export interface StrokeJson {
  parent: number;
  label: number | null;
  points: [number, number][];
}

export interface SketchJson {
  canvas: [number, number];
  strokes: StrokeJson[];
}

/** One captured stroke with everything the session knows about it. */
export interface CanvasStroke {
  id: number;
  points: [number, number][];
  /** Last label the service assigned, null before the first response. */
  serverLabel: number | null;
  confidence: number | null;
  /** User override; when set it wins over serverLabel everywhere. */
  override: number | null;
}

export const N_CATEGORIES = 22;

export function isValidCategory(id: number): boolean {
  return Number.isInteger(id) && id >= 0 && id < N_CATEGORIES;
}

/** Label a stroke carries in outgoing requests: override first. */
export function effectiveLabel(stroke: CanvasStroke): number | null {
  return stroke.override !== null ? stroke.override : stroke.serverLabel;
}
