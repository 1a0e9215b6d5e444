// CPU reference for the sphere view: the same ray math as the WebGL shader,
// usable headlessly for seam checks on rendered views.

export interface ViewOptions {
  yawDegrees: number;
  pitchDegrees: number;
  fovYDegrees: number;
  outWidth: number;
  outHeight: number;
}

const DEG = Math.PI / 180;

/**
 * Sample an equirectangular RGB buffer along view rays (bilinear, horizontal
 * wrap, vertical clamp). Yaw 0 looks at the panorama's horizontal center;
 * positive yaw looks right.
 */
export function renderView(
  rgb: Uint8Array,
  width: number,
  height: number,
  opts: ViewOptions,
): Uint8Array {
  const { outWidth, outHeight } = opts;
  const out = new Uint8Array(outWidth * outHeight * 3);
  const yaw = opts.yawDegrees * DEG;
  const pitch = opts.pitchDegrees * DEG;
  const tanHalf = Math.tan((opts.fovYDegrees * DEG) / 2);
  const aspect = outWidth / outHeight;
  const cy = Math.cos(yaw), sy = Math.sin(yaw);
  const cp = Math.cos(pitch), sp = Math.sin(pitch);
  for (let py = 0; py < outHeight; py++) {
    const ndcY = (1 - (2 * (py + 0.5)) / outHeight) * tanHalf;
    for (let px = 0; px < outWidth; px++) {
      const ndcX = ((2 * (px + 0.5)) / outWidth - 1) * tanHalf * aspect;
      // camera space: +z forward, +x right, +y up; rotate pitch then yaw
      let dx = ndcX, dy = ndcY, dz = 1;
      const ry = dy * cp - dz * sp * -1; // pitch up rotates the ray up
      const rz = dy * sp * -1 + dz * cp;
      dy = ry;
      dz = rz;
      const wx = dx * cy + dz * sy;
      const wz = -dx * sy + dz * cy;
      const lon = Math.atan2(wx, wz); // 0 at panorama center, + to the right
      const lat = Math.atan2(dy, Math.hypot(wx, wz));
      const u = (lon / (2 * Math.PI) + 0.5) * width - 0.5;
      const v = (0.5 - lat / Math.PI) * height - 0.5;
      const o = (py * outWidth + px) * 3;
      sampleBilinear(rgb, width, height, u, v, out, o);
    }
  }
  return out;
}

function sampleBilinear(
  rgb: Uint8Array,
  width: number,
  height: number,
  u: number,
  v: number,
  out: Uint8Array,
  o: number,
): void {
  const x0 = Math.floor(u);
  const y0 = Math.floor(v);
  const fx = u - x0;
  const fy = v - y0;
  const xa = ((x0 % width) + width) % width; // wrap
  const xb = (xa + 1) % width;
  const ya = Math.min(height - 1, Math.max(0, y0)); // clamp
  const yb = Math.min(height - 1, Math.max(0, y0 + 1));
  for (let ch = 0; ch < 3; ch++) {
    const p00 = rgb[(ya * width + xa) * 3 + ch];
    const p10 = rgb[(ya * width + xb) * 3 + ch];
    const p01 = rgb[(yb * width + xa) * 3 + ch];
    const p11 = rgb[(yb * width + xb) * 3 + ch];
    const top = p00 + (p10 - p00) * fx;
    const bot = p01 + (p11 - p01) * fx;
    out[o + ch] = Math.round(top + (bot - top) * fy);
  }
}

/**
 * Largest horizontal neighbor jump in a rendered view, normalized to [0, 1];
 * the harness metric for "no visible vertical edge".
 */
export function maxColumnDiscontinuity(view: Uint8Array, width: number, height: number): number {
  let worst = 0;
  for (let y = 0; y < height; y++) {
    for (let x = 0; x + 1 < width; x++) {
      const a = (y * width + x) * 3;
      const b = a + 3;
      const d =
        Math.abs(view[a] - view[b]) +
        Math.abs(view[a + 1] - view[b + 1]) +
        Math.abs(view[a + 2] - view[b + 2]);
      if (d > worst) worst = d;
    }
  }
  return worst / (3 * 255);
}
