// Client-side audio encoding: Float32 microphone frames at the context rate
// down to PCM16 mono 16 kHz RIFF WAV, the server's audio contract.

export const TARGET_RATE = 16000;

/** Linear resample to 16 kHz (identity when already there). */
export function resampleTo16k(samples: Float32Array, sourceRate: number): Float32Array {
  if (sourceRate === TARGET_RATE) return samples;
  if (sourceRate <= 0) throw new Error(`bad sample rate ${sourceRate}`);
  const n = Math.max(1, Math.round((samples.length * TARGET_RATE) / sourceRate));
  const out = new Float32Array(n);
  const step = (samples.length - 1) / Math.max(1, n - 1);
  for (let i = 0; i < n; i++) {
    const pos = i * step;
    const i0 = Math.floor(pos);
    const i1 = Math.min(samples.length - 1, i0 + 1);
    const f = pos - i0;
    out[i] = samples[i0] + (samples[i1] - samples[i0]) * f;
  }
  return out;
}

export function floatToPcm16(samples: Float32Array): Int16Array {
  const out = new Int16Array(samples.length);
  for (let i = 0; i < samples.length; i++) {
    const v = Math.max(-1, Math.min(1, samples[i]));
    out[i] = Math.round(v * 32767);
  }
  return out;
}

/** RIFF/WAVE container around PCM16 mono data. */
export function encodeWav(pcm: Int16Array, sampleRate: number = TARGET_RATE): Uint8Array {
  const dataBytes = pcm.length * 2;
  const buf = new ArrayBuffer(44 + dataBytes);
  const view = new DataView(buf);
  const ascii = (offset: number, text: string) => {
    for (let i = 0; i < text.length; i++) view.setUint8(offset + i, text.charCodeAt(i));
  };
  ascii(0, "RIFF");
  view.setUint32(4, 36 + dataBytes, true);
  ascii(8, "WAVE");
  ascii(12, "fmt ");
  view.setUint32(16, 16, true); // PCM chunk size
  view.setUint16(20, 1, true); // PCM format
  view.setUint16(22, 1, true); // mono
  view.setUint32(24, sampleRate, true);
  view.setUint32(28, sampleRate * 2, true); // byte rate
  view.setUint16(32, 2, true); // block align
  view.setUint16(34, 16, true); // bits per sample
  ascii(36, "data");
  view.setUint32(40, dataBytes, true);
  new Int16Array(buf, 44).set(pcm);
  return new Uint8Array(buf);
}

export function recordingToWavBase64(chunks: Float32Array[], sourceRate: number): string {
  let total = 0;
  for (const c of chunks) total += c.length;
  const joined = new Float32Array(total);
  let off = 0;
  for (const c of chunks) {
    joined.set(c, off);
    off += c.length;
  }
  const wav = encodeWav(floatToPcm16(resampleTo16k(joined, sourceRate)));
  let binary = "";
  const step = 0x8000;
  for (let i = 0; i < wav.length; i += step) {
    binary += String.fromCharCode(...wav.subarray(i, i + step));
  }
  return btoa(binary);
}
