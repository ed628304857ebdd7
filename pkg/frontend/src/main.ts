/** Entry point: read evaluator and stage, wire the view to the controller. */

import { ApiError, RatingApi } from "./api.js";
import { SessionController } from "./session.js";
import { DomView } from "./view.js";

function params(): { evaluator: string | null; stage: number } {
  const search = new URLSearchParams(window.location.search);
  return {
    evaluator: search.get("evaluator"),
    stage: Number(search.get("stage") ?? "1"),
  };
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app root");
  const { evaluator, stage } = params();
  const gate = document.getElementById("gate")!;
  if (!evaluator) {
    gate.hidden = false;
    return;
  }
  gate.hidden = true;

  const view = new DomView(root);
  const api = new RatingApi("");
  const controller = new SessionController(api, view, evaluator, stage);
  view.onSubmit = (scores) => void controller.submit(scores);

  const who = document.getElementById("who");
  if (who) who.textContent = `${evaluator} — stage ${stage}`;

  try {
    await controller.start();
  } catch (err) {
    view.showError(err instanceof ApiError ? err.detail : String(err));
  }
}

void boot();
