import { describe, expect, it } from "vitest";

import { maxColumnDiscontinuity, renderView } from "../src/sampler.js";

const W = 256;
const H = 128;

function smoothWrappablePano(): Uint8Array {
  // sinusoid in x wraps perfectly; gentle gradient in y
  const rgb = new Uint8Array(W * H * 3);
  for (let y = 0; y < H; y++) {
    for (let x = 0; x < W; x++) {
      const s = Math.sin((2 * Math.PI * x) / W);
      const o = (y * W + x) * 3;
      rgb[o] = Math.round(127 + 100 * s);
      rgb[o + 1] = Math.round(80 + (80 * y) / H);
      rgb[o + 2] = Math.round(127 - 100 * s);
    }
  }
  return rgb;
}

function hardSeamPano(): Uint8Array {
  // linear ramp in x: continuous inside, a 255-level cliff across the wrap
  const rgb = new Uint8Array(W * H * 3);
  for (let y = 0; y < H; y++) {
    for (let x = 0; x < W; x++) {
      const v = Math.round((255 * x) / (W - 1));
      rgb.set([v, v, v], (y * W + x) * 3);
    }
  }
  return rgb;
}

const view = { fovYDegrees: 75, outWidth: 96, outHeight: 64, pitchDegrees: 0 };

describe("sphere view seam readback", () => {
  it("seamless pano shows no discontinuity looking at the wrap (yaw 180)", () => {
    const rendered = renderView(smoothWrappablePano(), W, H, { ...view, yawDegrees: 180 });
    expect(maxColumnDiscontinuity(rendered, view.outWidth, view.outHeight)).toBeLessThan(0.05);
  });

  it("a hard seam is visible to the same harness", () => {
    const rendered = renderView(hardSeamPano(), W, H, { ...view, yawDegrees: 180 });
    expect(maxColumnDiscontinuity(rendered, view.outWidth, view.outHeight)).toBeGreaterThan(0.2);
  });

  it("the hard seam is out of frame at yaw 0", () => {
    const rendered = renderView(hardSeamPano(), W, H, { ...view, yawDegrees: 0 });
    expect(maxColumnDiscontinuity(rendered, view.outWidth, view.outHeight)).toBeLessThan(0.05);
  });

  it("yaw 0 centers the panorama's middle column", () => {
    const pano = new Uint8Array(W * H * 3); // black, single white column at W/2
    for (let y = 0; y < H; y++) pano.set([255, 255, 255], (y * W + W / 2) * 3);
    const rendered = renderView(pano, W, H, { ...view, yawDegrees: 0 });
    // the bright column lands in the center of the output
    let best = 0;
    let bestX = -1;
    for (let x = 0; x < view.outWidth; x++) {
      const o = (Math.floor(view.outHeight / 2) * view.outWidth + x) * 3;
      if (rendered[o] > best) {
        best = rendered[o];
        bestX = x;
      }
    }
    expect(Math.abs(bestX - view.outWidth / 2)).toBeLessThanOrEqual(1);
  });

  it("positive yaw brings content from the right into center", () => {
    // white column a quarter turn to the right of center
    const pano = new Uint8Array(W * H * 3);
    const quarter = (W / 2 + W / 4) % W;
    for (let y = 0; y < H; y++) pano.set([255, 255, 255], (y * W + quarter) * 3);
    const rendered = renderView(pano, W, H, { ...view, yawDegrees: 90 });
    let best = 0;
    let bestX = -1;
    for (let x = 0; x < view.outWidth; x++) {
      const o = (Math.floor(view.outHeight / 2) * view.outWidth + x) * 3;
      if (rendered[o] > best) {
        best = rendered[o];
        bestX = x;
      }
    }
    expect(Math.abs(bestX - view.outWidth / 2)).toBeLessThanOrEqual(1);
  });
});
