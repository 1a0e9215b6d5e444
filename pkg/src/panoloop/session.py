"""Co-creation session state machine.

A session owns an ordered list of segments. Each segment chains off the
previous one: its image prompt is the previous clip's last frame, recentered
to the session's current yaw. All mutations are serialized per session.
"""

from __future__ import annotations

import enum
import threading
import time
import uuid
from dataclasses import dataclass, field

from .audio import AudioInput
from .backends import BackendSuite, GenerationRequest, retry_call
from .errors import (
    BackendContractError,
    GenerationBusyError,
    IncompleteSessionError,
    InvalidInputError,
    InvalidParameterError,
    OutOfOrderError,
    SessionFullError,
    TransientBackendError,
)
from .frames import Clip, EquirectFrame, Frame, concat, last_frame, solid_frame
from .projection import ProjectionParams, edge_blend, to_equirect
from .prompts import RefinedPrompt, TextPrompt
from .yaw import YawAngle, recenter


class SegmentStatus(str, enum.Enum):
    PENDING = "pending"
    GENERATING = "generating"
    READY = "ready"
    FAILED = "failed"


class SessionState(str, enum.Enum):
    ACTIVE = "active"
    FINALIZING = "finalizing"
    COMPLETE = "complete"
    ABORTED = "aborted"


@dataclass
class Segment:
    index: int
    text_prompt: TextPrompt
    refined: RefinedPrompt
    image_prompt: EquirectFrame
    yaw_at_generation: YawAngle
    status: SegmentStatus = SegmentStatus.PENDING
    clip: Clip | None = None
    error: str | None = None


@dataclass
class Session:
    id: str
    target_segments: int
    segment_duration_s: float
    fps: int
    projection: ProjectionParams
    seed: int
    created_at: str
    segments: list = field(default_factory=list)
    current_yaw: YawAngle = field(default_factory=YawAngle)
    state: SessionState = SessionState.ACTIVE
    final_clip: Clip | None = None
    lock: threading.RLock = field(default_factory=threading.RLock, repr=False, compare=False)

    def generating_index(self) -> int | None:
        for seg in self.segments:
            if seg.status is SegmentStatus.GENERATING:
                return seg.index
        return None


@dataclass(frozen=True)
class FeedbackAction:
    """Next-segment instruction: a prompt source plus an optional recenter.

    reuse=True keeps the previous prompt; otherwise exactly one of text/audio
    supplies the new one. recenter, when present, is a yaw delta added to the
    session's current yaw.
    """

    reuse: bool = True
    text: str | None = None
    audio: AudioInput | None = None
    recenter: YawAngle | None = None

    def __post_init__(self):
        sources = sum((not self.reuse and self.text is not None,
                       not self.reuse and self.audio is not None))
        if not self.reuse and sources != 1:
            raise InvalidInputError("feedback needs exactly one of reuse/text/audio")
        if self.reuse and (self.text is not None or self.audio is not None):
            raise InvalidInputError("reuse cannot be combined with a new prompt")

    @classmethod
    def reuse_prompt(cls, recenter=None):
        return cls(reuse=True, recenter=_opt_yaw(recenter))

    @classmethod
    def typed(cls, text: str, recenter=None):
        return cls(reuse=False, text=text, recenter=_opt_yaw(recenter))

    @classmethod
    def spoken(cls, audio: AudioInput, recenter=None):
        return cls(reuse=False, audio=audio, recenter=_opt_yaw(recenter))


def _opt_yaw(value):
    if value is None or isinstance(value, YawAngle):
        return value
    return YawAngle(value)


class SessionEngine:
    """Drives sessions against a backend suite. Stateless between calls."""

    def __init__(
        self,
        backends: BackendSuite,
        projection: ProjectionParams | None = None,
        target_segments: int = 3,
        segment_duration_s: float = 10.0,
        fps: int = 24,
        seed: int = 0,
        retries: int = 3,
        sleep=time.sleep,
    ):
        if not 1 <= target_segments <= 32:
            raise InvalidParameterError(f"target_segments must be 1..32, got {target_segments}")
        self.backends = backends
        self.projection = projection or ProjectionParams()
        self.target_segments = target_segments
        self.segment_duration_s = segment_duration_s
        self.fps = fps
        self.seed = seed
        self.retries = retries
        self.sleep = sleep

    def start_session(self, text, image: Frame | None = None) -> Session:
        """Open a session with segment 0 pending.

        A text-only start bootstraps from a neutral mid-gray canvas, since the
        generator is image-to-video.
        """
        prompt = text if isinstance(text, TextPrompt) else TextPrompt(text)
        refined = self.backends.refiner.refine(prompt)
        if image is None:
            image = solid_frame(self.projection.out_width, self.projection.out_height)
        elif not isinstance(image, Frame):
            raise InvalidInputError("initial image must be a Frame")
        session = Session(
            id=uuid.uuid4().hex,
            target_segments=self.target_segments,
            segment_duration_s=self.segment_duration_s,
            fps=self.fps,
            projection=self.projection,
            seed=self.seed,
            created_at=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        )
        session.segments.append(
            Segment(
                index=0,
                text_prompt=prompt,
                refined=refined,
                image_prompt=to_equirect(image, self.projection),
                yaw_at_generation=session.current_yaw,
            )
        )
        return session

    def run_generation(self, session: Session, segment_index: int,
                       progress=None, state_cb=None) -> Session:
        """Generate one segment: pending -> generating -> ready | failed.

        Segments in status failed re-enter pending first (retry). The stored
        clip is the generator output edge-blended frame by frame, so chained
        image prompts are already seamless.
        """
        with session.lock:
            seg = self._segment(session, segment_index)
            if session.state is not SessionState.ACTIVE:
                raise OutOfOrderError(f"session is {session.state.value}")
            busy = session.generating_index()
            if busy is not None:
                raise GenerationBusyError(f"segment {busy} is already generating")
            if seg.status is SegmentStatus.FAILED:
                seg.status = SegmentStatus.PENDING
                seg.error = None
            if seg.status is not SegmentStatus.PENDING:
                raise OutOfOrderError(f"segment {segment_index} is {seg.status.value}")
            seg.status = SegmentStatus.GENERATING
            request = GenerationRequest(
                refined=seg.refined,
                image_prompt=seg.image_prompt,
                duration_s=session.segment_duration_s,
                fps=session.fps,
                seed=session.seed + segment_index,
            )
        if state_cb:
            state_cb(session)
        try:
            raw = retry_call(
                lambda: self.backends.generator.generate(request),
                retries=self.retries,
                sleep=self.sleep,
            )
            blended = []
            for i, f in enumerate(raw.frames):
                blended.append(
                    edge_blend(EquirectFrame(f.pixels), session.projection.blend_band_frac)
                )
                if progress:
                    progress(i + 1, len(raw.frames))
            clip = Clip(tuple(blended), fps=raw.fps)
        except (TransientBackendError, BackendContractError) as exc:
            with session.lock:
                seg.status = SegmentStatus.FAILED
                seg.error = str(exc)
            if state_cb:
                state_cb(session)
            return session
        with session.lock:
            seg.clip = clip
            seg.status = SegmentStatus.READY
        if state_cb:
            state_cb(session)
        return session

    def apply_feedback(self, session: Session, action: FeedbackAction) -> Segment:
        """Create the next pending segment from user feedback."""
        with session.lock:
            if session.state is not SessionState.ACTIVE:
                raise OutOfOrderError(f"session is {session.state.value}")
            if len(session.segments) >= session.target_segments:
                raise SessionFullError(f"session already has {session.target_segments} segments")
            prev = session.segments[-1]
            if prev.status is not SegmentStatus.READY:
                raise OutOfOrderError(f"segment {prev.index} is {prev.status.value}, not ready")
            if action.reuse:
                prompt = prev.text_prompt
            elif action.text is not None:
                prompt = TextPrompt(action.text)
            else:
                prompt = retry_call(
                    lambda: self.backends.transcriber.transcribe(action.audio),
                    retries=self.retries,
                    sleep=self.sleep,
                )
            refined = self.backends.refiner.refine(prompt)
            if action.recenter is not None:
                session.current_yaw = session.current_yaw + action.recenter
            seg = Segment(
                index=prev.index + 1,
                text_prompt=prompt,
                refined=refined,
                image_prompt=recenter(
                    EquirectFrame(last_frame(prev.clip).pixels), session.current_yaw
                ),
                yaw_at_generation=session.current_yaw,
            )
            session.segments.append(seg)
            return seg

    def finalize(self, session: Session) -> Clip:
        """Concatenate all ready segments into the final clip (idempotent)."""
        with session.lock:
            if session.final_clip is not None:
                return session.final_clip
            ready = [s for s in session.segments if s.status is SegmentStatus.READY]
            if len(session.segments) < session.target_segments or len(ready) != len(session.segments):
                raise IncompleteSessionError(
                    f"{len(ready)}/{session.target_segments} segments ready"
                )
            session.state = SessionState.FINALIZING
            session.final_clip = concat([s.clip for s in session.segments])
            session.state = SessionState.COMPLETE
            return session.final_clip

    @staticmethod
    def _segment(session: Session, index: int) -> Segment:
        if not 0 <= index < len(session.segments):
            raise OutOfOrderError(
                f"segment {index} does not exist yet ({len(session.segments)} created)"
            )
        return session.segments[index]
