/** DOM wiring for the drawing studio: one canvas, a palette strip, and a
 *  preview pane, all driven by the framework-free state classes. */

import { StudioClient } from "./client.js";
import { LiveChannel } from "./live.js";
import { SessionState } from "./session.js";
import { StrokeCapture } from "./stroke.js";
import { CanvasStroke } from "./types.js";

export interface AppElements {
  canvas: HTMLCanvasElement;
  palette: HTMLElement;
  preview: HTMLImageElement;
  generateButton: HTMLButtonElement;
  reseedButton: HTMLButtonElement;
  clearButton: HTMLButtonElement;
  toast: HTMLElement;
}

export class StudioApp {
  readonly session: SessionState;
  private readonly capture = new StrokeCapture();
  private selectedStrokeId: number | null = null;

  constructor(
    private readonly el: AppElements,
    private readonly client: StudioClient,
    private readonly live: LiveChannel,
  ) {
    this.session = new SessionState([el.canvas.width, el.canvas.height]);
  }

  async start(): Promise<void> {
    this.session.setPalette(await this.client.categories());
    this.renderPalette();
    await this.live.connect();
    await this.live.reset(this.session.canvas);
    this.bindEvents();
    this.refreshControls();
  }

  private bindEvents(): void {
    const canvas = this.el.canvas;
    canvas.addEventListener("pointerdown", (e) => {
      canvas.setPointerCapture(e.pointerId);
      this.capture.begin({ x: e.offsetX, y: e.offsetY });
    });
    canvas.addEventListener("pointermove", (e) => {
      this.capture.move({ x: e.offsetX, y: e.offsetY });
      if (this.capture.isActive) this.draw();
    });
    canvas.addEventListener("pointerup", () => void this.finishStroke());
    this.el.generateButton.addEventListener("click", () => void this.generate());
    this.el.reseedButton.addEventListener("click", () => {
      this.session.appearanceSeed = (Math.random() * 2 ** 31) | 0;
      void this.generate();
    });
    this.el.clearButton.addEventListener("click", () => void this.clearAll());
  }

  private async finishStroke(): Promise<void> {
    const points = this.capture.end();
    if (!points) return; // a click without a drag is not a stroke
    const stroke = this.session.addStroke(points);
    this.draw();
    const reply = await this.live.addStroke({
      parent: stroke.id,
      label: null,
      points,
    });
    if (reply.error) {
      this.session.removeStroke(stroke.id);
      this.showToast(reply.error.message);
    } else if (reply.labels) {
      this.session.applyLabels({
        labels: reply.labels,
        confidences: reply.confidences ?? [],
      });
    }
    this.draw();
    this.refreshControls();
  }

  /** Clicking a palette swatch recolors the selected stroke. */
  private renderPalette(): void {
    this.el.palette.replaceChildren();
    for (const cat of this.session.categories) {
      const swatch = document.createElement("button");
      swatch.className = "swatch";
      swatch.title = cat.name;
      swatch.style.background = cat.color;
      swatch.addEventListener("click", () => {
        if (this.selectedStrokeId !== null) {
          this.session.overrideLabel(this.selectedStrokeId, cat.id);
          this.draw();
        }
      });
      this.el.palette.appendChild(swatch);
    }
  }

  selectStroke(id: number | null): void {
    this.selectedStrokeId = id;
    this.draw();
  }

  private async generate(): Promise<void> {
    if (!this.session.canGenerate) return;
    this.session.generateBusy = true;
    this.refreshControls();
    try {
      const out = await this.client.generate(
        this.session.toSketchJson(),
        this.session.appearanceSeed,
      );
      if (out) {
        this.session.lastImage = out.image;
        this.el.preview.src = `data:image/png;base64,${out.image}`;
      }
    } catch (err) {
      this.showToast(err instanceof Error ? err.message : String(err));
    } finally {
      this.session.generateBusy = false;
      this.refreshControls();
    }
  }

  private async clearAll(): Promise<void> {
    this.session.clear();
    await this.live.reset(this.session.canvas);
    this.draw();
    this.refreshControls();
  }

  private refreshControls(): void {
    this.el.generateButton.disabled = !this.session.canGenerate;
  }

  private draw(): void {
    const ctx = this.el.canvas.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, this.el.canvas.width, this.el.canvas.height);
    for (const stroke of this.session.strokeList) {
      this.drawStroke(ctx, stroke);
    }
    const preview = this.capture.preview();
    if (preview.length >= 2) {
      this.drawPolyline(ctx, preview, "#444444", 2);
    }
  }

  private drawStroke(ctx: CanvasRenderingContext2D, stroke: CanvasStroke): void {
    const color = this.session.colorOf(this.session.displayLabel(stroke));
    const width = stroke.id === this.selectedStrokeId ? 4 : 2;
    this.drawPolyline(ctx, stroke.points, color, width);
  }

  private drawPolyline(
    ctx: CanvasRenderingContext2D,
    points: readonly [number, number][],
    color: string,
    width: number,
  ): void {
    ctx.strokeStyle = color;
    ctx.lineWidth = width;
    ctx.lineJoin = "round";
    ctx.lineCap = "round";
    ctx.beginPath();
    const [first, ...rest] = points;
    if (!first) return;
    ctx.moveTo(first[0], first[1]);
    for (const p of rest) ctx.lineTo(p[0], p[1]);
    ctx.stroke();
  }

  private showToast(message: string): void {
    this.el.toast.textContent = message;
    this.el.toast.classList.add("visible");
    setTimeout(() => this.el.toast.classList.remove("visible"), 4000);
  }
}

/** Entry point used by index.html. */
export async function mount(base = ""): Promise<StudioApp> {
  const byId = <T extends HTMLElement>(id: string) =>
    document.getElementById(id) as T;
  const client = new StudioClient(base || window.location.origin);
  const wsBase = (base || window.location.origin).replace(/^http/, "ws");
  const live = new LiveChannel(`${wsBase}/live`, (url) => new WebSocket(url));
  const app = new StudioApp(
    {
      canvas: byId<HTMLCanvasElement>("sketch-canvas"),
      palette: byId("palette"),
      preview: byId<HTMLImageElement>("preview"),
      generateButton: byId<HTMLButtonElement>("generate"),
      reseedButton: byId<HTMLButtonElement>("reseed"),
      clearButton: byId<HTMLButtonElement>("clear"),
      toast: byId("toast"),
    },
    client,
    live,
  );
  await app.start();
  return app;
}
