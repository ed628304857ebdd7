/** Typed client for the rating-service HTTP API. */

export interface ImagePayload {
  content_type: string;
  base64: string;
}

export interface SessionDescriptor {
  evaluator_id: string;
  stage: number;
  order: string[];
  cursor: number;
  total: number;
}

export interface RatingItem {
  complete: false;
  image_id: string;
  index: number;
  total: number;
  subset: "T2I" | "I2I";
  text_prompt: string;
  image: ImagePayload;
  reference: ImagePayload | null;
}

export interface StageComplete {
  complete: true;
  stage: number;
  rated: number;
  total: number;
}

export type NextItem = RatingItem | StageComplete;

export interface Ack {
  status: "ok";
  image_id: string;
  cursor: number;
  total: number;
  complete: boolean;
}

export interface StageProgress {
  stage: number;
  rated: number;
  total: number;
}

export interface TripleScore {
  quality: number;
  authenticity: number;
  correspondence: number;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export type FetchFn = (url: string, init?: RequestInit) => Promise<Response>;

async function parseOrThrow<T>(resp: Response): Promise<T> {
  if (resp.ok) {
    return (await resp.json()) as T;
  }
  let detail = resp.statusText;
  try {
    const body = (await resp.json()) as { detail?: string };
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, detail);
}

export class RatingApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchFn = (url, init) => globalThis.fetch(url, init),
  ) {}

  openSession(evaluatorId: string, stage: number): Promise<SessionDescriptor> {
    return this.post("/session", { evaluator_id: evaluatorId, stage });
  }

  nextItem(evaluatorId: string, stage: number): Promise<NextItem> {
    return this.get(`/session/${encodeURIComponent(evaluatorId)}/${stage}/next`);
  }

  submitRating(
    evaluatorId: string,
    stage: number,
    imageId: string,
    scores: TripleScore,
  ): Promise<Ack> {
    return this.post(`/session/${encodeURIComponent(evaluatorId)}/${stage}/rating`, {
      image_id: imageId,
      ...scores,
    });
  }

  async progress(evaluatorId: string): Promise<StageProgress[]> {
    const body = await this.get<{ stages: StageProgress[] }>(
      `/progress/${encodeURIComponent(evaluatorId)}`,
    );
    return body.stages;
  }

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path);
    return parseOrThrow<T>(resp);
  }

  private async post<T>(path: string, payload: unknown): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    return parseOrThrow<T>(resp);
  }
}
