"""Frame and clip containers.

Pixel data is row-major RGB, 8 bits per channel, held as read-only numpy
arrays so every transform can treat its inputs as immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyClipError, IncompatibleClipsError, InvalidInputError


def quantize_u8(values: np.ndarray) -> np.ndarray:
    """Clamp float pixel values to [0, 255] and round half up to uint8."""
    return (np.clip(values, 0.0, 255.0) + 0.5).astype(np.uint8)


def _freeze_pixels(pixels) -> np.ndarray:
    arr = np.asarray(pixels)
    if arr.dtype != np.uint8:
        raise InvalidInputError(f"pixels must be uint8, got {arr.dtype}")
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise InvalidInputError(f"pixels must have shape (h, w, 3), got {arr.shape}")
    h, w = arr.shape[:2]
    if h < 2 or w < 2:
        raise InvalidInputError(f"frame must be at least 2x2, got {w}x{h}")
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Frame:
    """Dense RGB raster. ``pixels`` is (height, width, 3) uint8, read-only."""

    pixels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pixels", _freeze_pixels(self.pixels))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(
            self.pixels, other.pixels
        )

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.width}x{self.height})"


class EquirectFrame(Frame):
    """Frame with equirectangular geometry: width is exactly twice the height."""

    def __post_init__(self):
        super().__post_init__()
        if self.width != 2 * self.height:
            raise InvalidInputError(
                f"equirect frame needs width == 2*height, got {self.width}x{self.height}"
            )


def solid_frame(width: int, height: int, rgb=(128, 128, 128), equirect: bool = False) -> Frame:
    """Uniform-color frame; the session bootstrap canvas uses mid-gray."""
    px = np.empty((height, width, 3), np.uint8)
    px[:] = np.asarray(rgb, np.uint8)
    return EquirectFrame(px) if equirect else Frame(px)


@dataclass(frozen=True, eq=False)
class Clip:
    """Ordered frame sequence at a fixed frame rate."""

    frames: tuple = field()
    fps: int = 24

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise EmptyClipError("clip needs at least one frame")
        if not isinstance(self.fps, int) or self.fps <= 0:
            raise InvalidInputError(f"fps must be a positive integer, got {self.fps!r}")
        first = frames[0]
        for f in frames:
            if not isinstance(f, Frame):
                raise InvalidInputError("clip frames must be Frame instances")
            if f.width != first.width or f.height != first.height:
                raise IncompatibleClipsError(
                    f"frame size {f.width}x{f.height} != {first.width}x{first.height}"
                )
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    @property
    def duration_seconds(self) -> float:
        return len(self.frames) / self.fps

    def __eq__(self, other) -> bool:
        if not isinstance(other, Clip):
            return NotImplemented
        return self.fps == other.fps and self.frames == other.frames


def last_frame(clip: Clip) -> Frame:
    """Final frame of a clip; the handoff image for the next segment."""
    if not isinstance(clip, Clip) or len(clip) == 0:
        raise EmptyClipError("cannot take the last frame of an empty clip")
    return clip.frames[-1]


def concat(clips) -> Clip:
    """Concatenate clips in order. All inputs must share dimensions and fps."""
    clips = list(clips)
    if not clips:
        raise EmptyClipError("concat needs at least one clip")
    first = clips[0]
    for c in clips[1:]:
        if c.fps != first.fps:
            raise IncompatibleClipsError(f"fps mismatch: {c.fps} != {first.fps}")
        if c.width != first.width or c.height != first.height:
            raise IncompatibleClipsError(
                f"size mismatch: {c.width}x{c.height} != {first.width}x{first.height}"
            )
    frames = []
    for c in clips:
        frames.extend(c.frames)
    return Clip(tuple(frames), fps=first.fps)
