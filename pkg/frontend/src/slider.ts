/** Slider state: three scores quantized to the 0.01 grid, with touched flags
 * guarding against accidental default submissions. */

import type { TripleScore } from "./api.js";

export const SCORE_MIN = 0;
export const SCORE_MAX = 5;
export const SCORE_STEP = 0.01;
export const DEFAULT_SCORE = 2.5;

export const DIMENSIONS = ["quality", "authenticity", "correspondence"] as const;
export type Dimension = (typeof DIMENSIONS)[number];

/** Snap a value onto the 0.01 grid inside [0, 5]. */
export function quantize(value: number): number {
  const clamped = Math.min(SCORE_MAX, Math.max(SCORE_MIN, value));
  return Math.round(clamped * 100) / 100;
}

export function isOnGrid(value: number): boolean {
  if (value < SCORE_MIN || value > SCORE_MAX) return false;
  return Math.abs(value * 100 - Math.round(value * 100)) < 1e-6;
}

export class SliderState {
  private values: Record<Dimension, number>;
  private touched: Record<Dimension, boolean>;

  constructor() {
    this.values = { quality: DEFAULT_SCORE, authenticity: DEFAULT_SCORE, correspondence: DEFAULT_SCORE };
    this.touched = { quality: false, authenticity: false, correspondence: false };
  }

  reset(): void {
    for (const dim of DIMENSIONS) {
      this.values[dim] = DEFAULT_SCORE;
      this.touched[dim] = false;
    }
  }

  set(dim: Dimension, value: number): void {
    this.values[dim] = quantize(value);
    this.touched[dim] = true;
  }

  /** Keyboard adjustment; deltas are +-0.01 or +-0.10. */
  nudge(dim: Dimension, delta: number): void {
    this.set(dim, this.values[dim] + delta);
  }

  get(dim: Dimension): number {
    return this.values[dim];
  }

  isTouched(dim: Dimension): boolean {
    return this.touched[dim];
  }

  allTouched(): boolean {
    return DIMENSIONS.every((dim) => this.touched[dim]);
  }

  scores(): TripleScore {
    return {
      quality: this.values.quality,
      authenticity: this.values.authenticity,
      correspondence: this.values.correspondence,
    };
  }
}
