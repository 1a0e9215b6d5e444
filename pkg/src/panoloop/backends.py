"""Pluggable transcription, refinement, and generation backends.

Each capability ships a deterministic offline mock plus a thin HTTP adapter.
The mocks are the backends the test suite runs against; the remote adapters
are configured from environment variables and kept out of acceptance runs.
"""

from __future__ import annotations

import base64
import hashlib
import io
import json
import os
import time
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .audio import AudioInput, wav_bytes
from .errors import (
    BackendContractError,
    EmptyTranscriptionError,
    InvalidParameterError,
    TransientBackendError,
)
from .frames import Clip, EquirectFrame, Frame, quantize_u8
from .prompts import DEFAULT_DESCRIPTORS, RefinedPrompt, TextPrompt, refine_prompt

TRANSCRIBE_TIMEOUT_S = 30.0
REFINE_TIMEOUT_S = 30.0
GENERATE_TIMEOUT_S = 120.0


@dataclass(frozen=True)
class GenerationRequest:
    """One segment's worth of conditioning for the video generator."""

    refined: RefinedPrompt
    image_prompt: EquirectFrame
    duration_s: float = 10.0
    fps: int = 24
    seed: int = 0

    def __post_init__(self):
        if self.duration_s <= 0:
            raise InvalidParameterError(f"duration_s must be > 0, got {self.duration_s}")
        if not isinstance(self.fps, int) or self.fps <= 0:
            raise InvalidParameterError(f"fps must be a positive integer, got {self.fps!r}")

    @property
    def frame_count(self) -> int:
        return int(round(self.duration_s * self.fps))


def retry_call(fn, retries: int = 3, initial_delay_s: float = 1.0, sleep=time.sleep):
    """Run fn, retrying transient errors with exponential backoff (1s, 2s, 4s)."""
    attempt = 0
    while True:
        try:
            return fn()
        except TransientBackendError:
            if attempt >= retries:
                raise
            sleep(initial_delay_s * (2 ** attempt))
            attempt += 1


# --- mocks -------------------------------------------------------------------

def packaged_transcripts() -> dict:
    """Content-hash -> transcript table shipped with the audio fixtures."""
    data = resources.files("panoloop.data.audio").joinpath("transcripts.json").read_text()
    return {entry["hash"]: entry["text"] for entry in json.loads(data)["fixtures"]}


def fixture_audio_path(fixture_id: str):
    """Path of a packaged fixture wav, by id (e.g. 'storm')."""
    path = resources.files("panoloop.data.audio").joinpath(f"{fixture_id}.wav")
    if not path.is_file():
        raise InvalidParameterError(f"unknown audio fixture {fixture_id!r}")
    return path


class MockTranscriber:
    """Sidecar-table transcription: content hash of the samples -> text."""

    def __init__(self, table: dict | None = None):
        self.table = dict(table) if table is not None else packaged_transcripts()

    def transcribe(self, audio: AudioInput) -> TextPrompt:
        if len(audio) == 0:
            raise EmptyTranscriptionError("audio is empty")
        text = self.table.get(audio.content_hash(), "").strip()
        if not text:
            raise EmptyTranscriptionError(f"no transcript for audio hash {audio.content_hash()[:12]}")
        return TextPrompt(text)


class MockRefiner:
    """Appends the fixed panorama descriptor set."""

    def __init__(self, descriptors=DEFAULT_DESCRIPTORS):
        self.descriptors = tuple(descriptors)

    def refine(self, prompt: TextPrompt) -> RefinedPrompt:
        return refine_prompt(prompt, self.descriptors)


class MockGenerator:
    """Synthesizes clips deterministically from (seed, prompt, image).

    Frame 0 is the image prompt byte-exact; later frames drift one column per
    frame (wrapping) under a prompt-hash-seeded per-channel gain ramp, so
    chaining and recentering stay observable in tests.
    """

    max_gain = 0.08

    def generate(self, req: GenerationRequest) -> Clip:
        n = req.frame_count
        base = req.image_prompt.pixels
        digest = hashlib.sha256(req.refined.rendered.encode("utf-8")).digest()
        mix = int.from_bytes(digest[:8], "big") ^ (req.seed & 0xFFFFFFFFFFFFFFFF)
        rng = np.random.default_rng(mix)
        gains = rng.uniform(-self.max_gain, self.max_gain, size=3)
        frames = [req.image_prompt]
        for t in range(1, n):
            drifted = np.roll(base, t, axis=1).astype(np.float32)
            ramp = t / (n - 1)
            drifted *= (1.0 + gains * ramp).astype(np.float32)
            frames.append(Frame(quantize_u8(drifted)))
        return Clip(tuple(frames), fps=req.fps)


@dataclass
class BackendSuite:
    """The three capabilities a session engine needs."""

    transcriber: object
    refiner: object
    generator: object

    @classmethod
    def mock(cls, transcripts: dict | None = None, descriptors=DEFAULT_DESCRIPTORS):
        return cls(
            transcriber=MockTranscriber(transcripts),
            refiner=MockRefiner(descriptors),
            generator=MockGenerator(),
        )

    @classmethod
    def from_env(cls, env=None):
        env = os.environ if env is None else env
        return cls(
            transcriber=RemoteTranscriber(env["ASR_API_URL"], env.get("ASR_API_KEY", "")),
            refiner=RemoteRefiner(env["LLM_API_URL"], env.get("LLM_API_KEY", "")),
            generator=RemoteGenerator(env["GEN_API_URL"], env.get("GEN_API_KEY", "")),
        )


# --- remote adapter shells ----------------------------------------------------

def _post_json(url: str, key: str, payload: dict, timeout_s: float, transport=None):
    if transport is None:
        import requests as transport  # deferred: mock deployments never import it
    headers = {"Authorization": f"Bearer {key}"} if key else {}
    try:
        resp = transport.post(url, json=payload, headers=headers, timeout=timeout_s)
    except Exception as exc:  # connection errors and timeouts are retryable
        raise TransientBackendError(f"request to {url} failed: {exc}") from exc
    if resp.status_code >= 500:
        raise TransientBackendError(f"{url} returned {resp.status_code}")
    if resp.status_code >= 400:
        raise BackendContractError(f"{url} returned {resp.status_code}: {resp.text[:200]}")
    try:
        return resp.json()
    except ValueError as exc:
        raise BackendContractError(f"{url} returned non-JSON body") from exc


@dataclass
class RemoteTranscriber:
    url: str
    api_key: str = ""
    transport: object = None
    timeout_s: float = TRANSCRIBE_TIMEOUT_S

    def transcribe(self, audio: AudioInput) -> TextPrompt:
        if len(audio) == 0:
            raise EmptyTranscriptionError("audio is empty")
        payload = {"audio_wav_base64": base64.b64encode(wav_bytes(audio)).decode("ascii")}
        body = _post_json(self.url, self.api_key, payload, self.timeout_s, self.transport)
        text = str(body.get("text", "")).strip()
        if not text:
            raise EmptyTranscriptionError("remote transcriber returned empty text")
        return TextPrompt(text)


@dataclass
class RemoteRefiner:
    """Remote rewrite of the base text; descriptor append stays local so the
    rendered-prompt invariants hold regardless of the hosted model."""

    url: str
    api_key: str = ""
    transport: object = None
    timeout_s: float = REFINE_TIMEOUT_S
    descriptors: tuple = DEFAULT_DESCRIPTORS

    def refine(self, prompt: TextPrompt) -> RefinedPrompt:
        body = _post_json(
            self.url, self.api_key, {"prompt": prompt.text}, self.timeout_s, self.transport
        )
        text = str(body.get("text", "")).strip() or prompt.text
        return refine_prompt(TextPrompt(text), self.descriptors)


@dataclass
class RemoteGenerator:
    url: str
    api_key: str = ""
    transport: object = None
    timeout_s: float = GENERATE_TIMEOUT_S

    def generate(self, req: GenerationRequest) -> Clip:
        from PIL import Image

        buf = io.BytesIO()
        Image.fromarray(req.image_prompt.pixels).save(buf, format="PNG")
        payload = {
            "prompt": req.refined.rendered,
            "image_png_base64": base64.b64encode(buf.getvalue()).decode("ascii"),
            "duration_s": req.duration_s,
            "fps": req.fps,
            "seed": req.seed,
        }
        body = _post_json(self.url, self.api_key, payload, self.timeout_s, self.transport)
        encoded = body.get("frames")
        if not isinstance(encoded, list) or len(encoded) != req.frame_count:
            got = len(encoded) if isinstance(encoded, list) else type(encoded).__name__
            raise BackendContractError(f"expected {req.frame_count} frames, got {got}")
        frames = []
        for i, item in enumerate(encoded):
            try:
                img = Image.open(io.BytesIO(base64.b64decode(item))).convert("RGB")
            except Exception as exc:
                raise BackendContractError(f"frame {i} is not a decodable PNG") from exc
            px = np.asarray(img)
            if px.shape[:2] != (req.image_prompt.height, req.image_prompt.width):
                raise BackendContractError(
                    f"frame {i} is {px.shape[1]}x{px.shape[0]}, "
                    f"expected {req.image_prompt.width}x{req.image_prompt.height}"
                )
            frames.append(Frame(px))
        return Clip(tuple(frames), fps=req.fps)
