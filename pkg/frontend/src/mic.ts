// Microphone capture to Float32 frames; encoding to WAV lives in wav.ts.
// Falls back to typed input upstream when permission is denied.

export interface Recording {
  stop(): Promise<{ chunks: Float32Array[]; sampleRate: number }>;
}

export async function startRecording(): Promise<Recording> {
  const stream = await navigator.mediaDevices.getUserMedia({
    audio: { echoCancellation: true, noiseSuppression: true, channelCount: 1 },
  });
  const ctx = new AudioContext();
  const source = ctx.createMediaStreamSource(stream);
  const chunks: Float32Array[] = [];
  // ScriptProcessor is deprecated but universally available and adequate for
  // short prompt recordings
  const node = ctx.createScriptProcessor(4096, 1, 1);
  node.onaudioprocess = (e) => {
    chunks.push(new Float32Array(e.inputBuffer.getChannelData(0)));
  };
  source.connect(node);
  node.connect(ctx.destination);
  return {
    async stop() {
      node.disconnect();
      source.disconnect();
      stream.getTracks().forEach((t) => t.stop());
      const sampleRate = ctx.sampleRate;
      await ctx.close();
      return { chunks, sampleRate };
    },
  };
}
