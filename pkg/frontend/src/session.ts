/** Session controller: drives open -> next -> submit -> advance.
 *
 * The server is authoritative: the controller never reorders items and a
 * reload resumes wherever the store says the cursor is. Network failures are
 * retried; a duplicate rejection after a retry means the first attempt was
 * persisted, so it is treated as success and the session advances.
 */

import { ApiError, RatingApi } from "./api.js";
import type { NextItem, RatingItem, StageComplete, TripleScore } from "./api.js";
import { isOnGrid } from "./slider.js";

export interface SessionView {
  showItem(item: RatingItem): void;
  showComplete(done: StageComplete): void;
  showError(message: string): void;
  clearError(): void;
}

export interface ControllerOptions {
  maxRetries?: number;
  retryDelayMs?: number;
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

export class SessionController {
  private current: RatingItem | null = null;
  private submitting = false;

  constructor(
    private readonly api: RatingApi,
    private readonly view: SessionView,
    private readonly evaluatorId: string,
    private readonly stage: number,
    private readonly options: ControllerOptions = {},
  ) {}

  /** Open (or resume) the session and render the first pending item. */
  async start(): Promise<void> {
    await this.api.openSession(this.evaluatorId, this.stage);
    await this.advance();
  }

  currentItem(): RatingItem | null {
    return this.current;
  }

  private async advance(): Promise<void> {
    const next: NextItem = await this.api.nextItem(this.evaluatorId, this.stage);
    if (next.complete) {
      this.current = null;
      this.view.showComplete(next);
    } else {
      this.current = next;
      this.view.showItem(next);
    }
  }

  /** Submit the triple for the current item; resolves once the session moved on. */
  async submit(scores: TripleScore): Promise<void> {
    if (this.current === null || this.submitting) return;
    for (const value of Object.values(scores)) {
      if (!isOnGrid(value)) {
        this.view.showError(`score ${value} is off the 0.01 grid`);
        return;
      }
    }
    this.submitting = true;
    this.view.clearError();
    const maxRetries = this.options.maxRetries ?? 3;
    const item = this.current;
    try {
      for (let attempt = 0; ; attempt++) {
        try {
          await this.api.submitRating(this.evaluatorId, this.stage, item.image_id, scores);
          break;
        } catch (err) {
          if (err instanceof ApiError) {
            if (err.status === 409) {
              // already stored (e.g. ack lost on a previous attempt): success
              break;
            }
            this.view.showError(err.detail);
            return;
          }
          // network failure: the server may or may not have persisted the
          // rating; retrying is safe because duplicates come back as 409
          if (attempt >= maxRetries) {
            this.view.showError(`submission failed after ${attempt + 1} attempts: ${err}`);
            return;
          }
          await sleep(this.options.retryDelayMs ?? 250);
        }
      }
      await this.advance();
    } finally {
      this.submitting = false;
    }
  }
}
