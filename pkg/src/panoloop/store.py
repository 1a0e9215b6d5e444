"""Filesystem persistence: one directory per session.

Layout:
    <root>/<session_id>/manifest.json
    <root>/<session_id>/segment_00/image_prompt.png
    <root>/<session_id>/segment_00/frame_00000.png ...
    <root>/<session_id>/final/frame_00000.png ...

Manifests are pretty-printed JSON with sorted keys; writes are atomic
(write-temp-then-rename). PNG frames round-trip byte-exactly.
"""

from __future__ import annotations

import io
import json
import os
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InvalidInputError, UnknownSessionError
from .frames import Clip, EquirectFrame, Frame
from .projection import ProjectionParams
from .prompts import RefinedPrompt, TextPrompt, _render
from .session import Segment, SegmentStatus, Session, SessionState
from .yaw import YawAngle

FRAME_NAME = "frame_%05d.png"


def png_bytes(frame: Frame) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(frame.pixels).save(buf, format="PNG")
    return buf.getvalue()


def frame_from_png(data: bytes, equirect: bool = False) -> Frame:
    try:
        img = Image.open(io.BytesIO(data))
        img = img.convert("RGB")
    except Exception as exc:
        raise InvalidInputError(f"not a decodable PNG: {exc}") from exc
    px = np.asarray(img)
    return EquirectFrame(px) if equirect else Frame(px)


def load_frame(path, equirect: bool = False) -> Frame:
    return frame_from_png(Path(path).read_bytes(), equirect=equirect)


def save_frame(frame: Frame, path) -> None:
    Image.fromarray(frame.pixels).save(str(path), format="PNG")


class SessionStore:
    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def session_dir(self, session_id: str) -> Path:
        return self.root / session_id

    def list_ids(self):
        return sorted(p.name for p in self.root.iterdir()
                      if p.is_dir() and (p / "manifest.json").exists())

    def manifest_dict(self, session: Session) -> dict:
        segments = []
        for seg in session.segments:
            segments.append({
                "index": seg.index,
                "status": seg.status.value,
                "text_prompt": seg.text_prompt.text,
                "rendered_prompt": seg.refined.rendered,
                "descriptors": list(seg.refined.descriptors),
                "yaw_at_generation": seg.yaw_at_generation.degrees,
                "frame_count": len(seg.clip) if seg.clip is not None else None,
                "error": seg.error,
            })
        p = session.projection
        return {
            "id": session.id,
            "state": session.state.value,
            "created_at": session.created_at,
            "current_yaw": session.current_yaw.degrees,
            "target_segments": session.target_segments,
            "segment_duration_s": session.segment_duration_s,
            "fps": session.fps,
            "seed": session.seed,
            "projection": {
                "out_width": p.out_width,
                "blur_sigma_frac": p.blur_sigma_frac,
                "fg_height_frac": p.fg_height_frac,
                "blend_band_frac": p.blend_band_frac,
            },
            "segments": segments,
            "final_frames": len(session.final_clip) if session.final_clip is not None else None,
        }

    def save_session(self, session: Session) -> None:
        """Persist manifest and any frames not yet on disk."""
        with session.lock:
            sdir = self.session_dir(session.id)
            sdir.mkdir(parents=True, exist_ok=True)
            for seg in session.segments:
                seg_dir = sdir / f"segment_{seg.index:02d}"
                seg_dir.mkdir(exist_ok=True)
                prompt_png = seg_dir / "image_prompt.png"
                if not prompt_png.exists():
                    save_frame(seg.image_prompt, prompt_png)
                if seg.clip is not None:
                    self._write_frames(seg_dir, seg.clip)
            if session.final_clip is not None:
                final_dir = sdir / "final"
                final_dir.mkdir(exist_ok=True)
                self._write_frames(final_dir, session.final_clip)
            manifest = json.dumps(self.manifest_dict(session), indent=2, sort_keys=True)
            tmp = sdir / "manifest.json.tmp"
            tmp.write_text(manifest)
            os.replace(tmp, sdir / "manifest.json")

    @staticmethod
    def _write_frames(target: Path, clip: Clip) -> None:
        # frames are immutable once written: skip when the last one exists
        if (target / (FRAME_NAME % (len(clip) - 1))).exists():
            return
        for i, frame in enumerate(clip.frames):
            save_frame(frame, target / (FRAME_NAME % i))

    def load_session(self, session_id: str) -> Session:
        """Rebuild a session from disk.

        A segment persisted as generating was interrupted mid-run and reloads
        as failed (its frames never hit the disk).
        """
        sdir = self.session_dir(session_id)
        manifest_path = sdir / "manifest.json"
        if not manifest_path.exists():
            raise UnknownSessionError(f"no session {session_id!r} under {self.root}")
        m = json.loads(manifest_path.read_text())
        proj = ProjectionParams(**m["projection"])
        session = Session(
            id=m["id"],
            target_segments=m["target_segments"],
            segment_duration_s=m["segment_duration_s"],
            fps=m["fps"],
            projection=proj,
            seed=m["seed"],
            created_at=m["created_at"],
            current_yaw=YawAngle(m["current_yaw"]),
            state=SessionState(m["state"]),
        )
        for entry in m["segments"]:
            seg_dir = sdir / f"segment_{entry['index']:02d}"
            prompt = TextPrompt(entry["text_prompt"])
            descriptors = tuple(entry["descriptors"])
            refined = RefinedPrompt(
                base=prompt, descriptors=descriptors,
                rendered=_render(prompt.text, descriptors),
            )
            status = SegmentStatus(entry["status"])
            error = entry.get("error")
            clip = None
            if status is SegmentStatus.READY and entry["frame_count"]:
                frames = tuple(
                    load_frame(seg_dir / (FRAME_NAME % i), equirect=True)
                    for i in range(entry["frame_count"])
                )
                clip = Clip(frames, fps=session.fps)
            elif status is SegmentStatus.GENERATING:
                status = SegmentStatus.FAILED
                error = "interrupted by restart"
            session.segments.append(
                Segment(
                    index=entry["index"],
                    text_prompt=prompt,
                    refined=refined,
                    image_prompt=load_frame(seg_dir / "image_prompt.png", equirect=True),
                    yaw_at_generation=YawAngle(entry["yaw_at_generation"]),
                    status=status,
                    clip=clip,
                    error=error,
                )
            )
        if m.get("final_frames"):
            final_dir = sdir / "final"
            frames = tuple(
                load_frame(final_dir / (FRAME_NAME % i), equirect=True)
                for i in range(m["final_frames"])
            )
            session.final_clip = Clip(frames, fps=session.fps)
        return session

    def load_all(self) -> dict:
        return {sid: self.load_session(sid) for sid in self.list_ids()}
