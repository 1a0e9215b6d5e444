"""Interactive co-creation pipeline for seamless 360-degree panorama video."""

from .backends import BackendSuite, GenerationRequest, MockGenerator, MockRefiner, MockTranscriber
from .frames import Clip, EquirectFrame, Frame, concat, last_frame, solid_frame
from .projection import ProjectionParams, edge_blend, seam_continuity, to_equirect
from .blur import gaussian_blur, gaussian_kernel
from .prompts import DEFAULT_DESCRIPTORS, RefinedPrompt, TextPrompt, refine_prompt
from .session import FeedbackAction, Segment, SegmentStatus, Session, SessionEngine, SessionState
from .yaw import YawAngle, normalize_yaw, recenter, yaw_to_shift

__version__ = "0.1.0"

__all__ = [
    "BackendSuite",
    "Clip",
    "DEFAULT_DESCRIPTORS",
    "EquirectFrame",
    "FeedbackAction",
    "Frame",
    "GenerationRequest",
    "MockGenerator",
    "MockRefiner",
    "MockTranscriber",
    "ProjectionParams",
    "RefinedPrompt",
    "Segment",
    "SegmentStatus",
    "Session",
    "SessionEngine",
    "SessionState",
    "TextPrompt",
    "YawAngle",
    "concat",
    "edge_blend",
    "gaussian_blur",
    "gaussian_kernel",
    "last_frame",
    "normalize_yaw",
    "recenter",
    "refine_prompt",
    "seam_continuity",
    "solid_frame",
    "to_equirect",
    "yaw_to_shift",
]
