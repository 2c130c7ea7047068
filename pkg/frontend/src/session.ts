/** Studio session state: strokes, overrides, palette, appearance seed. */

import {
  CanvasStroke,
  Category,
  N_CATEGORIES,
  SketchJson,
  effectiveLabel,
  isValidCategory,
} from "./types.js";

export interface LabelResult {
  labels: number[];
  confidences: number[];
}

export class SessionState {
  readonly canvas: [number, number];
  private strokes: CanvasStroke[] = [];
  private palette: Category[] = [];
  private nextId = 0;
  appearanceSeed = 0;
  lastImage: string | null = null;
  labelBusy = false;
  generateBusy = false;

  constructor(canvas: [number, number] = [512, 512]) {
    this.canvas = canvas;
  }

  setPalette(categories: Category[]): void {
    if (categories.length !== N_CATEGORIES) {
      throw new Error(`palette needs ${N_CATEGORIES} categories, got ${categories.length}`);
    }
    this.palette = categories.slice();
  }

  get categories(): readonly Category[] {
    return this.palette;
  }

  colorOf(label: number | null): string {
    if (label === null) return "#888888";
    const cat = this.palette[label];
    return cat ? cat.color : "#888888";
  }

  get strokeList(): readonly CanvasStroke[] {
    return this.strokes;
  }

  get isEmpty(): boolean {
    return this.strokes.length === 0;
  }

  /** Generation stays disabled until there is something to generate from. */
  get canGenerate(): boolean {
    return this.strokes.length > 0 && !this.generateBusy;
  }

  addStroke(points: [number, number][]): CanvasStroke {
    if (points.length < 2) throw new Error("stroke needs at least 2 points");
    const stroke: CanvasStroke = {
      id: this.nextId++,
      points,
      serverLabel: null,
      confidence: null,
      override: null,
    };
    this.strokes.push(stroke);
    return stroke;
  }

  removeStroke(id: number): boolean {
    const n = this.strokes.length;
    this.strokes = this.strokes.filter((s) => s.id !== id);
    return this.strokes.length < n;
  }

  clear(): void {
    this.strokes = [];
  }

  /**
   * Merges a label response in stroke order. Server labels land in
   * serverLabel only; user overrides are never touched, so a stroke the
   * user recolored keeps its category across any number of relabels.
   */
  applyLabels(result: LabelResult): void {
    const n = Math.min(result.labels.length, this.strokes.length);
    for (let i = 0; i < n; i++) {
      const stroke = this.strokes[i]!;
      stroke.serverLabel = result.labels[i]!;
      stroke.confidence = result.confidences[i] ?? null;
    }
  }

  overrideLabel(id: number, category: number | null): void {
    if (category !== null && !isValidCategory(category)) {
      throw new Error(`category ${category} outside 0..${N_CATEGORIES - 1}`);
    }
    const stroke = this.strokes.find((s) => s.id === id);
    if (!stroke) throw new Error(`no stroke ${id}`);
    stroke.override = category;
  }

  displayLabel(stroke: CanvasStroke): number | null {
    return effectiveLabel(stroke);
  }

  /**
   * The sketch document every request carries. Overrides win over server
   * labels; a category id outside 0..21 can never appear because the
   * override setter validates and the server only emits valid ids.
   */
  toSketchJson(): SketchJson {
    return {
      canvas: this.canvas,
      strokes: this.strokes.map((s) => ({
        parent: s.id,
        label: effectiveLabel(s),
        points: s.points.map((p) => [p[0], p[1]] as [number, number]),
      })),
    };
  }
}
