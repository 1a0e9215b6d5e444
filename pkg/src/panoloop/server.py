"""HTTP API for the co-creation loop.

REST + polling under /api/v1; generation is always asynchronous (202 + job
status). The viewer bundle, when present, is served statically at /.
"""

from __future__ import annotations

import base64
import binascii
import io
import json
import threading
import time

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .backends import BackendSuite
from .errors import (
    EmptyTranscriptionError,
    GenerationBusyError,
    IncompleteSessionError,
    InvalidAngleError,
    InvalidInputError,
    InvalidParameterError,
    OutOfOrderError,
    PanoloopError,
    PromptTooLongError,
    SessionFullError,
    UnknownSessionError,
)
from .frames import Frame
from .jobs import JobRunner
from .projection import ProjectionParams
from .session import FeedbackAction, SessionEngine
from .store import SessionStore, frame_from_png, png_bytes
from .audio import read_wav

MAX_IMAGE_DECODED_BYTES = 32 * 1024 * 1024

_STATUS_BY_ERROR = (
    (UnknownSessionError, 404),
    ((OutOfOrderError, GenerationBusyError, SessionFullError, IncompleteSessionError), 409),
    ((InvalidInputError, InvalidParameterError, InvalidAngleError,
      PromptTooLongError, EmptyTranscriptionError), 422),
)


def _error_status(exc: PanoloopError) -> int:
    for types, status in _STATUS_BY_ERROR:
        if isinstance(exc, types):
            return status
    return 500


def _decode_image(encoded: str) -> Frame:
    try:
        raw = base64.b64decode(encoded, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise InvalidInputError(f"image is not valid base64: {exc}") from exc
    from PIL import Image

    try:
        probe = Image.open(io.BytesIO(raw))
        w, h = probe.size
    except Exception as exc:
        raise InvalidInputError(f"image is not a decodable PNG: {exc}") from exc
    if w * h * 3 > MAX_IMAGE_DECODED_BYTES:
        raise InvalidInputError(f"decoded image {w}x{h} exceeds the 32 MB limit")
    return frame_from_png(raw)


def create_app(
    root,
    backends: BackendSuite | None = None,
    seed: int = 0,
    max_workers: int = 2,
    ui_dir=None,
    target_segments: int = 3,
    segment_duration_s: float = 10.0,
    fps: int = 24,
    projection: ProjectionParams | None = None,
    sleep=time.sleep,
) -> FastAPI:
    backends = backends or BackendSuite.mock()
    store = SessionStore(root)
    defaults = {
        "target_segments": target_segments,
        "segment_duration_s": segment_duration_s,
        "fps": fps,
        "seed": seed,
        "projection": projection or ProjectionParams(),
    }
    engine = SessionEngine(
        backends,
        projection=defaults["projection"],
        target_segments=target_segments,
        segment_duration_s=segment_duration_s,
        fps=fps,
        seed=seed,
        sleep=sleep,
    )
    runner = JobRunner(engine, store=store, max_workers=max_workers)
    registry = store.load_all()
    registry_lock = threading.Lock()

    app = FastAPI(title="panoloop", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.store = store
    app.state.runner = runner
    app.state.registry = registry
    app.state.engine = engine

    @app.exception_handler(PanoloopError)
    async def _panoloop_error(_request, exc: PanoloopError):
        return JSONResponse({"error": str(exc)}, status_code=_error_status(exc))

    def get_session(session_id: str):
        with registry_lock:
            session = registry.get(session_id)
        if session is None:
            raise UnknownSessionError(f"unknown session {session_id!r}")
        return session

    async def parse_body(request: Request) -> dict:
        raw = await request.body()
        try:
            body = json.loads(raw) if raw else {}
        except json.JSONDecodeError:
            return None
        return body if isinstance(body, dict) else None

    @app.post("/api/v1/sessions", status_code=201)
    async def api_create_session(request: Request):
        body = await parse_body(request)
        if body is None:
            return JSONResponse({"error": "malformed JSON body"}, status_code=400)
        if not isinstance(body.get("text"), str):
            raise InvalidInputError("body needs a 'text' field")
        params = body.get("params") or {}
        if not isinstance(params, dict):
            raise InvalidInputError("'params' must be an object")
        proj_keys = {"out_width", "blur_sigma_frac", "fg_height_frac", "blend_band_frac"}
        proj_overrides = {k: params[k] for k in proj_keys if k in params}
        base_proj = defaults["projection"]
        proj = ProjectionParams(
            out_width=proj_overrides.get("out_width", base_proj.out_width),
            blur_sigma_frac=proj_overrides.get("blur_sigma_frac", base_proj.blur_sigma_frac),
            fg_height_frac=proj_overrides.get("fg_height_frac", base_proj.fg_height_frac),
            blend_band_frac=proj_overrides.get("blend_band_frac", base_proj.blend_band_frac),
        )
        request_engine = SessionEngine(
            backends,
            projection=proj,
            target_segments=int(params.get("target_segments", defaults["target_segments"])),
            segment_duration_s=float(
                params.get("segment_duration_s", defaults["segment_duration_s"])
            ),
            fps=int(params.get("fps", defaults["fps"])),
            seed=int(params.get("seed", defaults["seed"])),
            sleep=sleep,
        )
        image = _decode_image(body["image"]) if body.get("image") else None
        session = request_engine.start_session(body["text"], image)
        with registry_lock:
            registry[session.id] = session
        store.save_session(session)
        return JSONResponse({"session_id": session.id}, status_code=201)

    @app.get("/api/v1/sessions")
    def api_list_sessions():
        with registry_lock:
            return {"sessions": sorted(registry)}

    @app.get("/api/v1/sessions/{session_id}/manifest")
    def api_get_manifest(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return store.manifest_dict(session)

    @app.post("/api/v1/sessions/{session_id}/segments/{segment_index}/generate", status_code=202)
    def api_generate(session_id: str, segment_index: int):
        session = get_session(session_id)
        job = runner.submit(session, segment_index)
        return JSONResponse(job.as_dict(), status_code=202)

    @app.get("/api/v1/sessions/{session_id}/jobs")
    def api_jobs(session_id: str):
        get_session(session_id)
        return {"jobs": runner.jobs_for(session_id)}

    @app.post("/api/v1/sessions/{session_id}/feedback", status_code=201)
    async def api_feedback(session_id: str, request: Request):
        body = await parse_body(request)
        if body is None:
            return JSONResponse({"error": "malformed JSON body"}, status_code=400)
        session = get_session(session_id)
        yaw = body.get("yaw_degrees")
        if yaw is not None and not isinstance(yaw, (int, float)):
            raise InvalidInputError("'yaw_degrees' must be a number")
        sources = [k for k in ("reuse", "text", "audio_wav_base64") if body.get(k)]
        if len(sources) != 1:
            raise InvalidInputError(
                "body needs exactly one of 'reuse', 'text', 'audio_wav_base64'"
            )
        if body.get("reuse"):
            action = FeedbackAction.reuse_prompt(recenter=yaw)
        elif body.get("text") is not None:
            if not isinstance(body["text"], str):
                raise InvalidInputError("'text' must be a string")
            action = FeedbackAction.typed(body["text"], recenter=yaw)
        else:
            try:
                wav = base64.b64decode(body["audio_wav_base64"], validate=True)
            except (binascii.Error, ValueError) as exc:
                raise InvalidInputError(f"audio is not valid base64: {exc}") from exc
            action = FeedbackAction.spoken(read_wav(wav), recenter=yaw)
        segment = engine.apply_feedback(session, action)
        store.save_session(session)
        return JSONResponse(
            {
                "segment_index": segment.index,
                "text_prompt": segment.text_prompt.text,
                "rendered_prompt": segment.refined.rendered,
                "yaw_at_generation": segment.yaw_at_generation.degrees,
                "current_yaw": session.current_yaw.degrees,
            },
            status_code=201,
        )

    @app.post("/api/v1/sessions/{session_id}/finalize")
    def api_finalize(session_id: str):
        session = get_session(session_id)
        engine.finalize(session)
        store.save_session(session)
        with session.lock:
            return store.manifest_dict(session)

    def frame_response(frame, fmt: str | None):
        if fmt == "raw":
            return Response(
                content=frame.pixels.tobytes(),
                media_type="application/octet-stream",
                headers={"X-Width": str(frame.width), "X-Height": str(frame.height)},
            )
        return Response(content=png_bytes(frame), media_type="image/png")

    @app.get("/api/v1/sessions/{session_id}/segments/{segment_index}/frames/{frame_index}")
    def api_get_frame(session_id: str, segment_index: int, frame_index: int,
                      format: str | None = None):
        session = get_session(session_id)
        with session.lock:
            if not 0 <= segment_index < len(session.segments):
                return JSONResponse({"error": "no such segment"}, status_code=404)
            clip = session.segments[segment_index].clip
            if clip is None or not 0 <= frame_index < len(clip):
                return JSONResponse({"error": "no such frame"}, status_code=404)
            frame = clip.frames[frame_index]
        return frame_response(frame, format)

    @app.get("/api/v1/sessions/{session_id}/segments/{segment_index}/image_prompt")
    def api_get_image_prompt(session_id: str, segment_index: int, format: str | None = None):
        session = get_session(session_id)
        with session.lock:
            if not 0 <= segment_index < len(session.segments):
                return JSONResponse({"error": "no such segment"}, status_code=404)
            frame = session.segments[segment_index].image_prompt
        return frame_response(frame, format)

    @app.get("/api/v1/sessions/{session_id}/final/frames/{frame_index}")
    def api_get_final_frame(session_id: str, frame_index: int, format: str | None = None):
        session = get_session(session_id)
        with session.lock:
            if session.final_clip is None or not 0 <= frame_index < len(session.final_clip):
                return JSONResponse({"error": "no such frame"}, status_code=404)
            frame = session.final_clip.frames[frame_index]
        return frame_response(frame, format)

    if ui_dir is not None:
        from pathlib import Path

        if Path(ui_dir).is_dir():
            from fastapi.staticfiles import StaticFiles

            app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
