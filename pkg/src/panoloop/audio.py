"""PCM16 mono audio input and WAV helpers for the transcription path."""

from __future__ import annotations

import hashlib
import io
import wave
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

SAMPLE_RATE = 16000


@dataclass(frozen=True, eq=False)
class AudioInput:
    """16-bit signed PCM, mono, 16 kHz.

    An empty buffer is representable; emptiness surfaces as an
    empty-transcription error when the audio is transcribed.
    """

    samples: np.ndarray
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.int16)
        if arr.ndim != 1:
            raise InvalidInputError(f"samples must be 1-D mono, got shape {arr.shape}")
        if self.sample_rate != SAMPLE_RATE:
            raise InvalidInputError(f"sample_rate must be {SAMPLE_RATE}, got {self.sample_rate}")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)

    def content_hash(self) -> str:
        """sha256 over the little-endian PCM bytes; the mock transcript key."""
        return hashlib.sha256(self.samples.astype("<i2").tobytes()).hexdigest()


def read_wav(source) -> AudioInput:
    """Load a RIFF WAV (path or bytes); must be PCM16 mono 16 kHz."""
    if isinstance(source, (bytes, bytearray)):
        fh = io.BytesIO(bytes(source))
    else:
        fh = open(source, "rb")
    try:
        with wave.open(fh, "rb") as wav:
            if wav.getnchannels() != 1:
                raise InvalidInputError(f"wav must be mono, got {wav.getnchannels()} channels")
            if wav.getsampwidth() != 2:
                raise InvalidInputError(f"wav must be 16-bit PCM, got {wav.getsampwidth() * 8}-bit")
            if wav.getframerate() != SAMPLE_RATE:
                raise InvalidInputError(f"wav must be {SAMPLE_RATE} Hz, got {wav.getframerate()}")
            raw = wav.readframes(wav.getnframes())
    except (wave.Error, EOFError) as exc:
        raise InvalidInputError(f"not a readable wav stream: {exc}") from exc
    finally:
        fh.close()
    return AudioInput(np.frombuffer(raw, dtype="<i2"))


def write_wav(audio: AudioInput, path) -> None:
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(audio.sample_rate)
        wav.writeframes(audio.samples.astype("<i2").tobytes())


def wav_bytes(audio: AudioInput) -> bytes:
    buf = io.BytesIO()
    with wave.open(buf, "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(audio.sample_rate)
        wav.writeframes(audio.samples.astype("<i2").tobytes())
    return buf.getvalue()


def synth_tone(freq_hz: float, seconds: float, amplitude: float = 0.4) -> AudioInput:
    """Deterministic sine tone; used to author fixtures and test audio."""
    n = int(round(seconds * SAMPLE_RATE))
    t = np.arange(n) / SAMPLE_RATE
    samples = (amplitude * 32767.0 * np.sin(2.0 * np.pi * freq_hz * t)).astype(np.int16)
    return AudioInput(samples)
