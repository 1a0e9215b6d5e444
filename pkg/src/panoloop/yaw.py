"""Yaw angles and horizontal recentering.

Convention: positive yaw points to the user's right; recentering shifts the
panorama content left so that direction lands at the horizontal center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidAngleError, InvalidInputError
from .frames import EquirectFrame


def _canonical_degrees(degrees: float) -> float:
    if not math.isfinite(degrees):
        raise InvalidAngleError(f"yaw must be finite, got {degrees!r}")
    return (float(degrees) + 180.0) % 360.0 - 180.0


@dataclass(frozen=True)
class YawAngle:
    """Horizontal direction in degrees, canonical range [-180, 180)."""

    degrees: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "degrees", _canonical_degrees(self.degrees))

    def __add__(self, other: "YawAngle | float") -> "YawAngle":
        delta = other.degrees if isinstance(other, YawAngle) else other
        return YawAngle(self.degrees + delta)


def normalize_yaw(degrees: float) -> YawAngle:
    """Wrap any finite angle into [-180, 180)."""
    return YawAngle(degrees)


def as_yaw(value) -> YawAngle:
    if isinstance(value, YawAngle):
        return value
    return YawAngle(value)


def yaw_to_shift(yaw, width: int) -> int:
    """Column offset for a yaw at a given panorama width.

    Rounds half up (floor(x + 0.5)) so |offset| never exceeds width/2 and the
    mapping is odd in yaw away from exact half-column angles.
    """
    if width < 2:
        raise InvalidInputError(f"width must be >= 2, got {width}")
    yaw = as_yaw(yaw)
    return int(math.floor(yaw.degrees / 360.0 * width + 0.5))


def recenter(frame: EquirectFrame, yaw) -> EquirectFrame:
    """Circularly shift columns so the chosen yaw becomes the horizontal center.

    Output column c equals input column (c + shift) mod width. Lossless and
    invertible: shifts are whole columns, never resampled.
    """
    shift = yaw_to_shift(yaw, frame.width)
    if shift == 0:
        return frame if isinstance(frame, EquirectFrame) else EquirectFrame(frame.pixels)
    return EquirectFrame(np.roll(frame.pixels, -shift, axis=1))
