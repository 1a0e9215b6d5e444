// Thin typed client for the session API (REST + job polling).

export interface SegmentInfo {
  index: number;
  status: "pending" | "generating" | "ready" | "failed";
  text_prompt: string;
  rendered_prompt: string;
  yaw_at_generation: number;
  frame_count: number | null;
  error: string | null;
}

export interface Manifest {
  id: string;
  state: string;
  current_yaw: number;
  target_segments: number;
  segment_duration_s: number;
  fps: number;
  projection: { out_width: number };
  segments: SegmentInfo[];
  final_frames: number | null;
}

export interface JobInfo {
  session_id: string;
  segment_index: number;
  phase: "queued" | "running" | "done" | "error";
  error_message: string | null;
  progress_frames: number;
  expected_frames: number;
}

export interface RawFrame {
  width: number;
  height: number;
  rgb: Uint8Array;
}

export interface FeedbackBody {
  reuse?: boolean;
  text?: string;
  audio_wav_base64?: string;
  yaw_degrees?: number;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function expectJson(resp: Response): Promise<any> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      detail = (await resp.json()).error ?? detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(resp.status, detail);
  }
  return resp.json();
}

export class ApiClient {
  constructor(private base: string = "") {}

  private url(path: string): string {
    return `${this.base}/api/v1${path}`;
  }

  async createSession(text: string, params?: Record<string, unknown>, imagePngBase64?: string) {
    const body: Record<string, unknown> = { text };
    if (params) body.params = params;
    if (imagePngBase64) body.image = imagePngBase64;
    const resp = await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return (await expectJson(resp)).session_id as string;
  }

  async manifest(sessionId: string): Promise<Manifest> {
    return expectJson(await fetch(this.url(`/sessions/${sessionId}/manifest`)));
  }

  async generate(sessionId: string, segmentIndex: number): Promise<JobInfo> {
    return expectJson(
      await fetch(this.url(`/sessions/${sessionId}/segments/${segmentIndex}/generate`), {
        method: "POST",
      }),
    );
  }

  async jobs(sessionId: string): Promise<JobInfo[]> {
    const body = await expectJson(await fetch(this.url(`/sessions/${sessionId}/jobs`)));
    return body.jobs;
  }

  async feedback(sessionId: string, body: FeedbackBody) {
    return expectJson(
      await fetch(this.url(`/sessions/${sessionId}/feedback`), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      }),
    );
  }

  async finalize(sessionId: string): Promise<Manifest> {
    return expectJson(
      await fetch(this.url(`/sessions/${sessionId}/finalize`), { method: "POST" }),
    );
  }

  frameUrl(sessionId: string, segmentIndex: number, frameIndex: number): string {
    return this.url(`/sessions/${sessionId}/segments/${segmentIndex}/frames/${frameIndex}`);
  }

  finalFrameUrl(sessionId: string, frameIndex: number): string {
    return this.url(`/sessions/${sessionId}/final/frames/${frameIndex}`);
  }

  private async rawFetch(path: string): Promise<RawFrame> {
    const resp = await fetch(this.url(path));
    if (!resp.ok) throw new ApiError(resp.status, resp.statusText);
    const width = Number(resp.headers.get("x-width"));
    const height = Number(resp.headers.get("x-height"));
    const rgb = new Uint8Array(await resp.arrayBuffer());
    return { width, height, rgb };
  }

  rawFrame(sessionId: string, segmentIndex: number, frameIndex: number): Promise<RawFrame> {
    return this.rawFetch(
      `/sessions/${sessionId}/segments/${segmentIndex}/frames/${frameIndex}?format=raw`,
    );
  }

  rawImagePrompt(sessionId: string, segmentIndex: number): Promise<RawFrame> {
    return this.rawFetch(`/sessions/${sessionId}/segments/${segmentIndex}/image_prompt?format=raw`);
  }

  /** Poll jobs until none are queued/running (or the deadline passes). */
  async drainJobs(sessionId: string, timeoutMs = 60_000, intervalMs = 150): Promise<JobInfo[]> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const jobs = await this.jobs(sessionId);
      if (jobs.every((j) => j.phase === "done" || j.phase === "error")) return jobs;
      if (Date.now() > deadline) throw new Error("generation did not settle in time");
      await new Promise((r) => setTimeout(r, intervalMs));
    }
  }
}
