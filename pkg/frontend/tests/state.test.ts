import { describe, expect, it } from "vitest";

import type { Manifest, SegmentInfo } from "../src/api.js";
import {
  applyDrag,
  compassYaw,
  deriveControls,
  feedbackBody,
  initialState,
  scrubTo,
} from "../src/state.js";

function segment(index: number, status: SegmentInfo["status"], frames = 4): SegmentInfo {
  return {
    index,
    status,
    text_prompt: "p",
    rendered_prompt: "p, extras",
    yaw_at_generation: 0,
    frame_count: status === "ready" ? frames : null,
    error: null,
  };
}

function manifest(segments: SegmentInfo[], target = 3, state = "active"): Manifest {
  return {
    id: "s",
    state,
    current_yaw: 0,
    target_segments: target,
    segment_duration_s: 1,
    fps: 4,
    projection: { out_width: 64 },
    segments,
    final_frames: null,
  };
}

describe("gaze", () => {
  it("drag accumulates and normalizes", () => {
    let s = initialState();
    s = applyDrag(s, 200, 0);
    expect(s.gazeYaw).toBe(-160);
    s = applyDrag(s, -20, 100);
    expect(s.gazeYaw).toBe(180 - 360); // normalized
    expect(s.gazePitch).toBe(89); // clamped
  });

  it("compass readout equals the yaw sent, within a degree", () => {
    let s = initialState();
    for (const drag of [44.7, 0.2, -90.4, 133.3]) {
      s = applyDrag(s, drag, 0);
      const body = feedbackBody(s, "reuse", true);
      expect(body.yaw_degrees).toBe(compassYaw(s));
      expect(Math.abs((body.yaw_degrees as number) - s.gazeYaw)).toBeLessThanOrEqual(0.5);
    }
  });
});

describe("feedbackBody", () => {
  const at45 = applyDrag(initialState(), 45, 0);

  it("reuse with no recenter sends no yaw field", () => {
    expect(feedbackBody(at45, "reuse", false)).toEqual({ reuse: true });
  });

  it("recenter-here at gaze 45 sends 45", () => {
    expect(feedbackBody(at45, "reuse", true)).toEqual({ reuse: true, yaw_degrees: 45 });
  });

  it("typed mode trims and requires text", () => {
    expect(feedbackBody(at45, "typed", false, "  misty harbor ")).toEqual({
      text: "misty harbor",
    });
    expect(() => feedbackBody(at45, "typed", false, "   ")).toThrow();
  });

  it("spoken mode requires a recording", () => {
    expect(() => feedbackBody(at45, "spoken", false)).toThrow();
    expect(feedbackBody(at45, "spoken", false, undefined, "QUJD")).toEqual({
      audio_wav_base64: "QUJD",
    });
  });
});

describe("deriveControls gating", () => {
  it("fresh session: only generate segment 0", () => {
    const c = deriveControls(manifest([segment(0, "pending")]), []);
    expect(c.canGenerate).toBe(0);
    expect(c.canFeedback).toBe(false);
    expect(c.canFinalize).toBe(false);
  });

  it("while generating everything is locked", () => {
    const c = deriveControls(manifest([segment(0, "generating")]), []);
    expect(c.busy).toBe(true);
    expect(c.canGenerate).toBeNull();
    expect(c.canFeedback).toBe(false);
    expect(c.canFinalize).toBe(false);
  });

  it("ready segment with room: feedback allowed, generate idle", () => {
    const c = deriveControls(manifest([segment(0, "ready")]), []);
    expect(c.canGenerate).toBeNull();
    expect(c.canFeedback).toBe(true);
  });

  it("failed segment offers a retry", () => {
    const c = deriveControls(manifest([segment(0, "failed")]), []);
    expect(c.canGenerate).toBe(0);
    expect(c.canFeedback).toBe(false);
  });

  it("all segments ready at target: finalize only", () => {
    const m = manifest(
      [segment(0, "ready"), segment(1, "ready"), segment(2, "ready")],
      3,
    );
    const c = deriveControls(m, []);
    expect(c.canFeedback).toBe(false); // session full
    expect(c.canFinalize).toBe(true);
  });

  it("queued job counts as busy", () => {
    const c = deriveControls(manifest([segment(0, "pending")]), [
      {
        session_id: "s",
        segment_index: 0,
        phase: "queued",
        error_message: null,
        progress_frames: 0,
        expected_frames: 4,
      },
    ]);
    expect(c.busy).toBe(true);
    expect(c.canGenerate).toBeNull();
  });

  it("every gated action is one the server would accept", () => {
    // enumerate manifest shapes and assert gating implies server-side legality
    const statuses: SegmentInfo["status"][] = ["pending", "generating", "ready", "failed"];
    for (const s0 of statuses) {
      for (const s1 of [null, ...statuses] as (SegmentInfo["status"] | null)[]) {
        const segs = [segment(0, s0)];
        if (s1) segs.push(segment(1, s1));
        const m = manifest(segs, 2);
        const c = deriveControls(m, []);
        if (c.canGenerate !== null) {
          const target = m.segments[c.canGenerate];
          expect(["pending", "failed"]).toContain(target.status);
          expect(m.segments.some((x) => x.status === "generating")).toBe(false);
        }
        if (c.canFeedback) {
          expect(m.segments[m.segments.length - 1].status).toBe("ready");
          expect(m.segments.length).toBeLessThan(m.target_segments);
        }
        if (c.canFinalize) {
          expect(
            m.segments.length === m.target_segments &&
              m.segments.every((x) => x.status === "ready"),
          ).toBe(true);
        }
      }
    }
  });
});

describe("scrubTo", () => {
  it("clamps into the ready segment's range and ignores non-ready", () => {
    const m = manifest([segment(0, "ready", 4), segment(1, "pending")], 2);
    let s = initialState();
    s = scrubTo(s, m, 0, 99);
    expect(s.playbackFrame).toBe(3);
    const unchanged = scrubTo(s, m, 1, 0);
    expect(unchanged.playingSegment).toBe(0);
  });
});
