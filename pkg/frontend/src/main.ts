// Wires the cockpit together: sphere view, compass, prompt controls, mic,
// recenter-here toggle, timeline, and playback against the session API.

import { ApiClient, ApiError, Manifest } from "./api.js";
import { startRecording, Recording } from "./mic.js";
import { SphereRenderer } from "./renderer.js";
import {
  applyDrag,
  compassYaw,
  deriveControls,
  feedbackBody,
  initialState,
  jobActive,
  PromptMode,
  scrubTo,
  ViewerState,
} from "./state.js";
import { renderTimeline } from "./timeline.js";
import { recordingToWavBase64 } from "./wav.js";

const api = new ApiClient("");
let state: ViewerState = initialState();
let manifest: Manifest | null = null;
let renderer: SphereRenderer | null = null;
let recording: Recording | null = null;
let recordedWav: string | undefined;
let pollTimer: number | null = null;
let playTimer: number | null = null;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

function toast(message: string): void {
  const el = $("toast");
  el.textContent = message;
  el.classList.add("toast-show");
  window.setTimeout(() => el.classList.remove("toast-show"), 3200);
}

const frameCache = new Map<string, HTMLImageElement>();

async function loadFrame(url: string): Promise<HTMLImageElement> {
  const cached = frameCache.get(url);
  if (cached) return cached;
  const img = new Image();
  img.src = url;
  await img.decode();
  if (frameCache.size > 512) frameCache.clear(); // crude cap for long sessions
  frameCache.set(url, img);
  return img;
}

function drawHud(): void {
  $("compass").textContent = `${compassYaw(state)}°`;
  const seg = manifest?.segments[state.playingSegment];
  $("frame-label").textContent = seg?.frame_count
    ? `segment ${state.playingSegment} · frame ${state.playbackFrame + 1}/${seg.frame_count}`
    : "—";
}

async function redraw(): Promise<void> {
  if (!renderer || !manifest || !state.sessionId) return;
  const seg = manifest.segments[state.playingSegment];
  if (seg?.status === "ready" && seg.frame_count) {
    try {
      const img = await loadFrame(
        api.frameUrl(state.sessionId, state.playingSegment, state.playbackFrame),
      );
      renderer.setFrame(img);
    } catch {
      /* frame may be mid-write during recovery; next tick retries */
    }
  }
  renderer.draw(state.gazeYaw, state.gazePitch);
  drawHud();
}

function syncControls(): void {
  const controls = deriveControls(manifest, []);
  const busy = state.pendingJob !== null || controls.busy;
  ($("submit") as HTMLButtonElement).disabled = busy || !controls.canFeedback;
  ($("generate") as HTMLButtonElement).disabled = busy || controls.canGenerate === null;
  ($("record") as HTMLButtonElement).disabled = busy;
  $("status").textContent = state.pendingJob
    ? `generating ${state.pendingJob.progress_frames}/${state.pendingJob.expected_frames}`
    : controls.statusLine;
  renderTimeline($("timeline"), manifest, controls, state.playingSegment, {
    onScrub: (segment, frame) => {
      if (manifest) state = scrubTo(state, manifest, segment, frame);
      void redraw();
      syncControls();
    },
    onGenerate: (segment) => void generateSegment(segment),
    onFinalize: () => void finalize(),
  });
}

async function refreshManifest(): Promise<void> {
  if (!state.sessionId) return;
  manifest = await api.manifest(state.sessionId);
  syncControls();
  await redraw();
}

async function generateSegment(index: number): Promise<void> {
  if (!state.sessionId) return;
  try {
    await api.generate(state.sessionId, index);
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      toast(`not now: ${err.message}`);
      return;
    }
    throw err;
  }
  pollJobs();
}

function pollJobs(): void {
  if (pollTimer !== null) return;
  const tick = async () => {
    if (!state.sessionId) return;
    const jobs = await api.jobs(state.sessionId);
    const active = jobActive(jobs);
    state = { ...state, pendingJob: active };
    if (active) {
      syncControls();
      pollTimer = window.setTimeout(tick, 400);
    } else {
      pollTimer = null;
      const last = jobs[jobs.length - 1];
      if (last?.phase === "error") toast(`generation failed: ${last.error_message}`);
      await refreshManifest();
      const ready = manifest?.segments.filter((s) => s.status === "ready").length ?? 0;
      if (ready > 0 && manifest) {
        state = scrubTo(state, manifest, ready - 1, 0);
        startPlayback();
      }
      syncControls();
    }
  };
  pollTimer = window.setTimeout(tick, 200);
}

function startPlayback(): void {
  if (playTimer !== null) window.clearInterval(playTimer);
  const fps = manifest?.fps ?? 24;
  playTimer = window.setInterval(() => {
    if (!manifest) return;
    const seg = manifest.segments[state.playingSegment];
    if (seg?.status !== "ready" || !seg.frame_count) return;
    state = scrubTo(
      state,
      manifest,
      state.playingSegment,
      (state.playbackFrame + 1) % seg.frame_count,
    );
    void redraw();
  }, 1000 / fps);
}

async function submitFeedback(): Promise<void> {
  if (!state.sessionId) return;
  const mode = (document.querySelector('input[name="mode"]:checked') as HTMLInputElement)
    .value as PromptMode;
  const recenterOn = ($("recenter-here") as HTMLInputElement).checked;
  let body;
  try {
    body = feedbackBody(
      state,
      mode,
      recenterOn,
      ($("prompt") as HTMLTextAreaElement).value,
      recordedWav,
    );
  } catch (err) {
    toast(String(err instanceof Error ? err.message : err));
    return;
  }
  try {
    const created = await api.feedback(state.sessionId, body);
    toast(`segment ${created.segment_index}: ${created.rendered_prompt}`);
    recordedWav = undefined;
    $("record").textContent = "● record";
    await refreshManifest();
    await generateSegment(created.segment_index);
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      toast(`not now: ${err.message}`);
      return;
    }
    throw err;
  }
}

async function finalize(): Promise<void> {
  if (!state.sessionId) return;
  try {
    manifest = await api.finalize(state.sessionId);
    toast(`final clip assembled: ${manifest.final_frames} frames`);
    syncControls();
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) toast(`not yet: ${err.message}`);
    else throw err;
  }
}

async function toggleRecord(): Promise<void> {
  const button = $("record") as HTMLButtonElement;
  if (recording) {
    const { chunks, sampleRate } = await recording.stop();
    recording = null;
    recordedWav = recordingToWavBase64(chunks, sampleRate);
    button.textContent = "● record";
    (document.querySelector('input[value="spoken"]') as HTMLInputElement).checked = true;
    toast("recorded; submit to transcribe");
    return;
  }
  try {
    recording = await startRecording();
    button.textContent = "■ stop";
  } catch {
    toast("microphone unavailable; type your prompt instead");
    (document.querySelector('input[value="typed"]') as HTMLInputElement).checked = true;
  }
}

function bindGaze(canvas: HTMLCanvasElement): void {
  const degPerPixel = 0.22;
  canvas.addEventListener("pointerdown", (e) => {
    canvas.setPointerCapture(e.pointerId);
    let lastX = e.clientX;
    let lastY = e.clientY;
    const move = (ev: PointerEvent) => {
      // dragging right pulls content right: gaze turns left
      state = applyDrag(
        state,
        -(ev.clientX - lastX) * degPerPixel,
        (ev.clientY - lastY) * degPerPixel,
      );
      lastX = ev.clientX;
      lastY = ev.clientY;
      void redraw();
    };
    const up = () => {
      canvas.removeEventListener("pointermove", move);
      canvas.removeEventListener("pointerup", up);
    };
    canvas.addEventListener("pointermove", move);
    canvas.addEventListener("pointerup", up);
  });
}

async function startSession(): Promise<void> {
  const text = ($("prompt") as HTMLTextAreaElement).value.trim();
  if (!text) {
    toast("enter an initial prompt first");
    return;
  }
  const sessionId = await api.createSession(text);
  state = { ...initialState(), sessionId };
  $("session-label").textContent = sessionId.slice(0, 8);
  await refreshManifest();
  await generateSegment(0);
}

function init(): void {
  const canvas = $("view") as HTMLCanvasElement;
  renderer = new SphereRenderer(canvas);
  bindGaze(canvas);
  $("start").addEventListener("click", () => void startSession());
  $("submit").addEventListener("click", () => void submitFeedback());
  $("generate").addEventListener("click", () => {
    const controls = deriveControls(manifest, []);
    if (controls.canGenerate !== null) void generateSegment(controls.canGenerate);
  });
  $("record").addEventListener("click", () => void toggleRecord());
  window.setInterval(() => void redraw(), 250); // keep HUD and view fresh
  syncControls();
}

init();
