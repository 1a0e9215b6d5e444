"""Flat-to-equirectangular projection, seam blending, and the seam metric."""

from __future__ import annotations

import math
from dataclasses import dataclass

import cv2
import numpy as np

from .blur import blur_pixels
from .errors import InvalidInputError, InvalidParameterError
from .frames import EquirectFrame, Frame, quantize_u8


@dataclass(frozen=True)
class ProjectionParams:
    """Knobs for the 2:1 projection pass.

    blur_sigma_frac and blend_band_frac are fractions of the output height and
    width; fg_height_frac fixes how tall the sharp foreground band is.
    """

    out_width: int = 2048
    blur_sigma_frac: float = 0.05
    fg_height_frac: float = 0.75
    blend_band_frac: float = 0.05

    def __post_init__(self):
        if self.out_width < 4 or self.out_width % 2 != 0:
            raise InvalidParameterError(f"out_width must be even and >= 4, got {self.out_width}")
        if not 0 < self.fg_height_frac <= 1:
            raise InvalidParameterError(f"fg_height_frac must be in (0, 1], got {self.fg_height_frac}")
        if not 0 <= self.blend_band_frac < 0.5:
            raise InvalidParameterError(f"blend_band_frac must be in [0, 0.5), got {self.blend_band_frac}")
        if self.blur_sigma_frac < 0:
            raise InvalidParameterError(f"blur_sigma_frac must be >= 0, got {self.blur_sigma_frac}")

    @property
    def out_height(self) -> int:
        return self.out_width // 2


def resize_bilinear(pixels: np.ndarray, width: int, height: int) -> np.ndarray:
    """Classic 2x2 bilinear resample (cv2 INTER_LINEAR), deterministic."""
    if pixels.shape[1] == width and pixels.shape[0] == height:
        return pixels
    return cv2.resize(pixels, (width, height), interpolation=cv2.INTER_LINEAR)


def foreground_geometry(src_width: int, src_height: int, params: ProjectionParams):
    """(width, height, x, y) of the sharp foreground band on the canvas.

    Height is fg_height_frac of the canvas, width preserves the source aspect
    ratio, and the band is centered on both axes (negative offsets mean the
    band overflows and gets center-cropped).
    """
    fg_h = max(2, int(math.floor(params.fg_height_frac * params.out_height + 0.5)))
    fg_w = max(2, int(math.floor(src_width * fg_h / src_height + 0.5)))
    return fg_w, fg_h, (params.out_width - fg_w) // 2, (params.out_height - fg_h) // 2


def to_equirect(src: Frame, params: ProjectionParams = ProjectionParams()) -> EquirectFrame:
    """Project a flat frame onto a seamless 2:1 canvas.

    Background: the source stretched (no crop) over the full canvas, then
    Gaussian-blurred with sigma = blur_sigma_frac * out_height. Foreground:
    the source scaled aspect-preserving to fg_height_frac of the canvas
    height, composited opaque and centered. Edge blending runs last.
    """
    if not isinstance(src, Frame):
        raise InvalidInputError("to_equirect needs a Frame")
    out_w, out_h = params.out_width, params.out_height
    bg = resize_bilinear(src.pixels, out_w, out_h)
    sigma = params.blur_sigma_frac * out_h
    canvas = blur_pixels(bg, sigma)  # fresh writable buffer either way

    fg_w, fg_h, x0, y0 = foreground_geometry(src.width, src.height, params)
    fg = resize_bilinear(src.pixels, fg_w, fg_h)
    # clip the paste rectangle to the canvas (oversized foregrounds crop center)
    sx, sy = max(0, -x0), max(0, -y0)
    dx, dy = max(0, x0), max(0, y0)
    cw = min(fg_w - sx, out_w - dx)
    ch = min(fg_h - sy, out_h - dy)
    canvas[dy:dy + ch, dx:dx + cw] = fg[sy:sy + ch, sx:sx + cw]

    band = int(math.floor(params.blend_band_frac * out_w + 0.5))
    if band:
        _blend_bands(canvas, band)
    return EquirectFrame(canvas)


def edge_blend(frame: EquirectFrame, band_frac: float = 0.05) -> EquirectFrame:
    """Cross-fade each side band with the mirrored opposite edge.

    The fade weight falls linearly from 0.5 at the outermost column to 0 at
    the band interior, so column 0 and column width-1 converge. band_frac 0
    is the identity.
    """
    if not 0 <= band_frac < 0.5:
        raise InvalidParameterError(f"band_frac must be in [0, 0.5), got {band_frac}")
    band = int(math.floor(band_frac * frame.width + 0.5))
    if band == 0:
        return frame if isinstance(frame, EquirectFrame) else EquirectFrame(frame.pixels)
    out = np.array(frame.pixels, copy=True)
    _blend_bands(out, band)
    return EquirectFrame(out)


def _blend_bands(px: np.ndarray, band: int) -> None:
    """Cross-fade the outer bands of a writable pixel array, in place."""
    w = px.shape[1]
    weights = 0.5 * (band - np.arange(band, dtype=np.float32)) / band  # 0.5 -> edge
    wl = weights[None, :, None]
    left = px[:, :band].astype(np.float32)
    right_mirror = px[:, w - 1 : w - 1 - band : -1].astype(np.float32)
    right = px[:, w - band :].astype(np.float32)
    left_mirror = px[:, band - 1 :: -1].astype(np.float32)
    px[:, :band] = quantize_u8((1.0 - wl) * left + wl * right_mirror)
    wr = weights[::-1][None, :, None]  # 0 at band interior -> 0.5 at last column
    px[:, w - band :] = quantize_u8((1.0 - wr) * right + wr * left_mirror)


def seam_continuity(frame: Frame) -> float:
    """Mean absolute left/right edge difference, normalized to [0, 1]."""
    a = frame.pixels[:, 0].astype(np.int16)
    b = frame.pixels[:, -1].astype(np.int16)
    return float(np.mean(np.abs(a - b))) / 255.0
