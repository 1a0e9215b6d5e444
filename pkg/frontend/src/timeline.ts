// Segment strip: one chip per segment with status styling, click-to-scrub,
// and the finalize button (enabled only when the server would accept it).

import type { Manifest } from "./api.js";
import type { Controls } from "./state.js";

export interface TimelineCallbacks {
  onScrub(segment: number, frame: number): void;
  onGenerate(segment: number): void;
  onFinalize(): void;
}

export function renderTimeline(
  host: HTMLElement,
  manifest: Manifest | null,
  controls: Controls,
  playingSegment: number,
  callbacks: TimelineCallbacks,
): void {
  host.textContent = "";
  if (!manifest) return;
  for (const seg of manifest.segments) {
    const chip = document.createElement("button");
    chip.className = `chip chip-${seg.status}` + (seg.index === playingSegment ? " chip-active" : "");
    chip.textContent = `${seg.index}: ${seg.status}`;
    chip.title = seg.rendered_prompt;
    if (seg.status === "ready") {
      chip.addEventListener("click", () => callbacks.onScrub(seg.index, 0));
    } else if (controls.canGenerate === seg.index) {
      chip.addEventListener("click", () => callbacks.onGenerate(seg.index));
      chip.classList.add("chip-actionable");
      chip.textContent = `${seg.index}: ${seg.status === "failed" ? "retry" : "generate"}`;
    } else {
      chip.disabled = true;
    }
    host.appendChild(chip);
  }
  for (let i = manifest.segments.length; i < manifest.target_segments; i++) {
    const ghost = document.createElement("span");
    ghost.className = "chip chip-ghost";
    ghost.textContent = `${i}: —`;
    host.appendChild(ghost);
  }
  const finalize = document.createElement("button");
  finalize.className = "chip chip-finalize";
  finalize.textContent = manifest.state === "complete" ? "final ✓" : "finalize";
  finalize.disabled = !controls.canFinalize;
  finalize.addEventListener("click", () => callbacks.onFinalize());
  host.appendChild(finalize);
}
