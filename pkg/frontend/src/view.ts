/** DOM view: reference pane on the left, the image under evaluation on the
 * right at its native size, prompt text, three quantized sliders with
 * keyboard nudging, and a progress line. Submit stays disabled until every
 * slider has been touched. */

import type { RatingItem, StageComplete, TripleScore } from "./api.js";
import { DIMENSIONS, SliderState, quantize } from "./slider.js";
import type { Dimension } from "./slider.js";
import type { SessionView } from "./session.js";

function dataUrl(payload: { content_type: string; base64: string }): string {
  return `data:${payload.content_type};base64,${payload.base64}`;
}

export class DomView implements SessionView {
  readonly sliders = new SliderState();
  onSubmit: (scores: TripleScore) => void = () => {};

  private readonly refPane: HTMLElement;
  private readonly refImage: HTMLImageElement;
  private readonly image: HTMLImageElement;
  private readonly prompt: HTMLElement;
  private readonly progress: HTMLElement;
  private readonly error: HTMLElement;
  private readonly ratingPanel: HTMLElement;
  private readonly completePanel: HTMLElement;
  private readonly completeSummary: HTMLElement;
  private readonly submitButton: HTMLButtonElement;
  private readonly inputs = new Map<Dimension, HTMLInputElement>();
  private readonly readouts = new Map<Dimension, HTMLElement>();

  constructor(private readonly root: HTMLElement) {
    const byId = <T extends HTMLElement>(id: string): T => {
      const el = root.querySelector<T>(`#${id}`);
      if (!el) throw new Error(`missing element #${id}`);
      return el;
    };
    this.refPane = byId("reference-pane");
    this.refImage = byId("reference-image");
    this.image = byId("aigi-image");
    this.prompt = byId("text-prompt");
    this.progress = byId("progress");
    this.error = byId("error");
    this.ratingPanel = byId("rating-panel");
    this.completePanel = byId("complete-panel");
    this.completeSummary = byId("complete-summary");
    this.submitButton = byId("submit");

    for (const dim of DIMENSIONS) {
      const input = byId<HTMLInputElement>(`slider-${dim}`);
      const readout = byId(`value-${dim}`);
      this.inputs.set(dim, input);
      this.readouts.set(dim, readout);
      input.addEventListener("input", () => {
        this.sliders.set(dim, Number(input.value));
        this.refresh();
      });
      input.addEventListener("keydown", (ev) => this.handleKey(dim, ev));
    }
    this.submitButton.addEventListener("click", () => {
      if (this.sliders.allTouched()) this.onSubmit(this.sliders.scores());
    });
  }

  private handleKey(dim: Dimension, ev: KeyboardEvent): void {
    const deltas: Record<string, number> = {
      ArrowUp: 0.01,
      ArrowRight: 0.01,
      ArrowDown: -0.01,
      ArrowLeft: -0.01,
      PageUp: 0.1,
      PageDown: -0.1,
    };
    const delta = deltas[ev.key];
    if (delta === undefined) return;
    ev.preventDefault();
    this.sliders.nudge(dim, delta);
    this.refresh();
  }

  /** Push slider state into the controls; the readout always shows the
   * quantized value that would be submitted. */
  private refresh(): void {
    for (const dim of DIMENSIONS) {
      const value = this.sliders.get(dim);
      this.inputs.get(dim)!.value = value.toFixed(2);
      this.readouts.get(dim)!.textContent = value.toFixed(2);
    }
    this.submitButton.disabled = !this.sliders.allTouched();
  }

  showItem(item: RatingItem): void {
    this.ratingPanel.hidden = false;
    this.completePanel.hidden = true;
    this.image.src = dataUrl(item.image);
    if (item.reference) {
      this.refPane.hidden = false;
      this.refImage.src = dataUrl(item.reference);
    } else {
      this.refPane.hidden = true;
      this.refImage.removeAttribute("src");
    }
    this.prompt.textContent = item.text_prompt;
    this.progress.textContent = `image ${item.index + 1} of ${item.total}`;
    this.sliders.reset();
    this.refresh();
    this.clearError();
  }

  showComplete(done: StageComplete): void {
    this.ratingPanel.hidden = true;
    this.completePanel.hidden = false;
    this.completeSummary.textContent =
      `Stage ${done.stage} complete: ${done.rated} of ${done.total} images rated. ` +
      "Thank you!";
    this.clearError();
  }

  showError(message: string): void {
    this.error.textContent = message;
    this.error.hidden = false;
  }

  clearError(): void {
    this.error.textContent = "";
    this.error.hidden = true;
  }

  /** Test hook mirroring a user dragging a slider to `value`. */
  drag(dim: Dimension, value: number): void {
    const input = this.inputs.get(dim)!;
    input.value = String(quantize(value));
    input.dispatchEvent(new Event("input", { bubbles: true }));
  }

  submitEnabled(): boolean {
    return !this.submitButton.disabled;
  }

  referenceVisible(): boolean {
    return !this.refPane.hidden;
  }
}
