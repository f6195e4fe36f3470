"""Raw video frame value type shared by the motion gate and the classifiers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class FrameError(ValueError):
    pass


@dataclass
class Frame:
    """A timestamped 8-bit image, grayscale (h, w) or color (h, w, 3)."""

    pixels: np.ndarray
    timestamp: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.pixels, np.ndarray):
            self.pixels = np.asarray(self.pixels)
        if self.pixels.dtype != np.uint8:
            raise FrameError(f"pixel data must be uint8, got {self.pixels.dtype}")
        if self.pixels.ndim == 3 and self.pixels.shape[2] == 1:
            self.pixels = self.pixels[:, :, 0]
        if self.pixels.ndim not in (2, 3):
            raise FrameError(f"expected (h, w) or (h, w, 3) pixels, got shape {self.pixels.shape}")
        if self.pixels.ndim == 3 and self.pixels.shape[2] != 3:
            raise FrameError(f"color frames must have 3 channels, got {self.pixels.shape[2]}")
        if self.width == 0 or self.height == 0:
            raise FrameError(f"zero-dimension frame: {self.pixels.shape}")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else self.pixels.shape[2]

    @classmethod
    def filled(cls, width: int, height: int, value: int, timestamp: float = 0.0, channels: int = 1) -> "Frame":
        shape = (height, width) if channels == 1 else (height, width, channels)
        return cls(np.full(shape, value, dtype=np.uint8), timestamp)


def luminance(frame: Frame) -> np.ndarray:
    """Grayscale plane as float64; color uses ITU-R 601 luma weights."""
    px = frame.pixels.astype(np.float64)
    if frame.channels == 1:
        return px
    return 0.299 * px[:, :, 0] + 0.587 * px[:, :, 1] + 0.114 * px[:, :, 2]
