// Viewer state and control gating: derived entirely from (manifest, gaze),
// so the screen reproduces after a reload and no action can reach the server
// out of order.

import type { FeedbackBody, JobInfo, Manifest } from "./api.js";
import { normalizeYaw } from "./yaw.js";

export type PromptMode = "reuse" | "typed" | "spoken";

export interface ViewerState {
  sessionId: string | null;
  gazeYaw: number; // [-180, 180)
  gazePitch: number; // display only, clamped
  playingSegment: number;
  playbackFrame: number;
  pendingJob: JobInfo | null;
}

export function initialState(): ViewerState {
  return {
    sessionId: null,
    gazeYaw: 0,
    gazePitch: 0,
    playingSegment: 0,
    playbackFrame: 0,
    pendingJob: null,
  };
}

export function applyDrag(state: ViewerState, dxDegrees: number, dyDegrees: number): ViewerState {
  return {
    ...state,
    gazeYaw: normalizeYaw(state.gazeYaw + dxDegrees),
    gazePitch: Math.max(-89, Math.min(89, state.gazePitch + dyDegrees)),
  };
}

/** The compass readout; what "recenter here" sends derives from this. */
export function compassYaw(state: ViewerState): number {
  return Math.round(normalizeYaw(state.gazeYaw));
}

export function jobActive(jobs: JobInfo[]): JobInfo | null {
  return jobs.find((j) => j.phase === "queued" || j.phase === "running") ?? null;
}

export interface Controls {
  canGenerate: number | null; // segment index the generate button targets
  canFeedback: boolean;
  canFinalize: boolean;
  busy: boolean;
  statusLine: string;
}

/** Gate every control on the manifest so illegal calls cannot be issued. */
export function deriveControls(manifest: Manifest | null, jobs: JobInfo[]): Controls {
  if (!manifest) {
    return {
      canGenerate: null,
      canFeedback: false,
      canFinalize: false,
      busy: false,
      statusLine: "no session",
    };
  }
  const busy = jobActive(jobs) !== null ||
    manifest.segments.some((s) => s.status === "generating");
  const complete = manifest.state === "complete";
  const last = manifest.segments[manifest.segments.length - 1];
  const actionable = manifest.segments.find(
    (s) => s.status === "pending" || s.status === "failed",
  );
  const allReady =
    manifest.segments.length === manifest.target_segments &&
    manifest.segments.every((s) => s.status === "ready");
  return {
    canGenerate: !busy && !complete && actionable ? actionable.index : null,
    canFeedback:
      !busy &&
      !complete &&
      last.status === "ready" &&
      manifest.segments.length < manifest.target_segments,
    canFinalize: !busy && (complete || allReady),
    busy,
    statusLine: complete
      ? "session complete"
      : busy
        ? "generating..."
        : `segment ${last.index}: ${last.status}`,
  };
}

/**
 * Build the feedback request. When recenter is on, the yaw sent is exactly
 * the compass readout (the displayed integer degrees).
 */
export function feedbackBody(
  state: ViewerState,
  mode: PromptMode,
  recenterHere: boolean,
  typedText?: string,
  audioWavBase64?: string,
): FeedbackBody {
  const body: FeedbackBody = {};
  if (mode === "reuse") body.reuse = true;
  else if (mode === "typed") {
    if (!typedText || !typedText.trim()) throw new Error("typed prompt is empty");
    body.text = typedText.trim();
  } else {
    if (!audioWavBase64) throw new Error("no recorded audio");
    body.audio_wav_base64 = audioWavBase64;
  }
  if (recenterHere) body.yaw_degrees = compassYaw(state);
  return body;
}

/** Clamp playback position into the segment's frame range. */
export function scrubTo(
  state: ViewerState,
  manifest: Manifest,
  segment: number,
  frame: number,
): ViewerState {
  const seg = manifest.segments[segment];
  if (!seg || seg.status !== "ready" || !seg.frame_count) return state;
  const clamped = Math.max(0, Math.min(seg.frame_count - 1, frame));
  return { ...state, playingSegment: segment, playbackFrame: clamped };
}
