"""Asynchronous generation jobs: bounded worker pool, one job per session."""

from __future__ import annotations

import enum
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import GenerationBusyError
from .session import Session, SessionEngine


class JobPhase(str, enum.Enum):
    QUEUED = "queued"
    RUNNING = "running"
    DONE = "done"
    ERROR = "error"


@dataclass
class JobStatus:
    session_id: str
    segment_index: int
    phase: JobPhase = JobPhase.QUEUED
    error_message: str | None = None
    progress_frames: int = 0
    expected_frames: int = 0

    def as_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "segment_index": self.segment_index,
            "phase": self.phase.value,
            "error_message": self.error_message,
            "progress_frames": self.progress_frames,
            "expected_frames": self.expected_frames,
        }


class JobRunner:
    """Runs segment generations off the request path.

    At most one active job per session (submitting another is a busy error);
    global parallelism is bounded by the pool size.
    """

    def __init__(self, engine: SessionEngine, store=None, max_workers: int = 2):
        self.engine = engine
        self.store = store
        self._pool = ThreadPoolExecutor(max_workers=max_workers)
        self._lock = threading.Lock()
        self._active: dict = {}   # session_id -> JobStatus
        self._history: dict = {}  # session_id -> [JobStatus]

    def submit(self, session: Session, segment_index: int) -> JobStatus:
        from .session import SegmentStatus, SessionState
        from .errors import OutOfOrderError

        with self._lock:
            if session.id in self._active:
                running = self._active[session.id]
                raise GenerationBusyError(
                    f"segment {running.segment_index} already {running.phase.value}"
                )
            # validate now so the caller gets an immediate ordering error
            with session.lock:
                if session.state is not SessionState.ACTIVE:
                    raise OutOfOrderError(f"session is {session.state.value}")
                if not 0 <= segment_index < len(session.segments):
                    raise OutOfOrderError(
                        f"segment {segment_index} does not exist yet "
                        f"({len(session.segments)} created)"
                    )
                seg = session.segments[segment_index]
                if seg.status not in (SegmentStatus.PENDING, SegmentStatus.FAILED):
                    raise OutOfOrderError(f"segment {segment_index} is {seg.status.value}")
                expected = int(round(session.segment_duration_s * session.fps))
            job = JobStatus(session.id, segment_index, expected_frames=expected)
            self._active[session.id] = job
            self._history.setdefault(session.id, []).append(job)
        self._pool.submit(self._run, session, job)
        return job

    def _run(self, session: Session, job: JobStatus) -> None:
        job.phase = JobPhase.RUNNING
        try:
            def progress(done, total):
                job.progress_frames = done
                job.expected_frames = total

            self.engine.run_generation(
                session, job.segment_index, progress=progress, state_cb=self._persist
            )
            from .session import SegmentStatus

            seg = session.segments[job.segment_index]
            if seg.status is SegmentStatus.READY:
                job.phase = JobPhase.DONE
            else:
                job.phase = JobPhase.ERROR
                job.error_message = seg.error or "generation failed"
        except Exception as exc:  # engine-level validation races surface here
            job.phase = JobPhase.ERROR
            job.error_message = str(exc)
        finally:
            with self._lock:
                self._active.pop(session.id, None)

    def _persist(self, session: Session) -> None:
        if self.store is not None:
            self.store.save_session(session)

    def jobs_for(self, session_id: str):
        with self._lock:
            return [j.as_dict() for j in self._history.get(session_id, [])]

    def wait_idle(self, session_id: str, timeout_s: float = 60.0) -> bool:
        """Testing hook: block until the session has no active job."""
        import time

        deadline = time.monotonic() + timeout_s
        while time.monotonic() < deadline:
            with self._lock:
                if session_id not in self._active:
                    return True
            time.sleep(0.005)
        return False

    def shutdown(self) -> None:
        self._pool.shutdown(wait=True)
