// Yaw math mirrored from the server so the client can predict shifts exactly.

/** Wrap a finite angle into [-180, 180). */
export function normalizeYaw(degrees: number): number {
  if (!Number.isFinite(degrees)) {
    throw new Error(`yaw must be finite, got ${degrees}`);
  }
  return ((degrees + 180) % 360 + 360) % 360 - 180;
}

/** Column offset for a yaw at a panorama width (round half up). */
export function yawToShift(degrees: number, width: number): number {
  return Math.floor((normalizeYaw(degrees) / 360) * width + 0.5);
}

/**
 * Circularly shift packed RGB columns: out[:, c] = in[:, (c + shift) mod w].
 * This is the transform the server applies when recentering, so tests can
 * recompute expected image prompts byte-exactly.
 */
export function rollColumns(
  rgb: Uint8Array,
  width: number,
  height: number,
  yawDegrees: number,
): Uint8Array {
  const shift = yawToShift(yawDegrees, width);
  const out = new Uint8Array(rgb.length);
  for (let y = 0; y < height; y++) {
    const row = y * width * 3;
    for (let c = 0; c < width; c++) {
      const src = row + ((((c + shift) % width) + width) % width) * 3;
      const dst = row + c * 3;
      out[dst] = rgb[src];
      out[dst + 1] = rgb[src + 1];
      out[dst + 2] = rgb[src + 2];
    }
  }
  return out;
}
