"""Classifier input preparation: resizing and training-style augmentation.

Resizing is a full-frame bilinear resample (aspect is allowed to
distort, nothing is cropped) with half-pixel sample centers, quantized
back to 8 bits with round-half-up. Augmentation is a coin-flip
horizontal mirror followed by a rotation drawn uniformly from
[-20, +20] degrees about the image center, with edge replication
outside the source; both are deterministic for a given seed.
"""
from __future__ import annotations

import random

import numpy as np

from .frames import Frame, FrameError

ROTATION_RANGE_DEG = 20.0


def _as_3channel(px: np.ndarray) -> np.ndarray:
    if px.ndim == 2:
        return np.stack([px, px, px], axis=-1)
    return px


def _quantize(values: np.ndarray) -> np.ndarray:
    # round-half-up, then clip into the 8-bit range
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


def _sample_bilinear(px: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Sample (h, w[, c]) pixels at float coordinate grids, clamped to edges."""
    h, w = px.shape[:2]
    ys = np.clip(ys, 0.0, h - 1.0)
    xs = np.clip(xs, 0.0, w - 1.0)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = ys - y0
    fx = xs - x0
    if px.ndim == 3:
        fy = fy[..., None]
        fx = fx[..., None]
    vals = px.astype(np.float64)
    top = vals[y0, x0] * (1.0 - fx) + vals[y0, x1] * fx
    bottom = vals[y1, x0] * (1.0 - fx) + vals[y1, x1] * fx
    return top * (1.0 - fy) + bottom * fy


def preprocess(frame: Frame, size: int) -> Frame:
    """Resize to a size x size 3-channel frame for classifier input."""
    if size <= 0:
        raise FrameError(f"target size must be positive, got {size}")
    px = _as_3channel(frame.pixels)
    h, w = px.shape[:2]
    # Half-pixel-center mapping from destination to source coordinates.
    sy = (np.arange(size) + 0.5) * (h / size) - 0.5
    sx = (np.arange(size) + 0.5) * (w / size) - 0.5
    ys, xs = np.meshgrid(sy, sx, indexing="ij")
    resized = _sample_bilinear(px, ys, xs)
    return Frame(_quantize(resized), frame.timestamp)


def flip_horizontal(frame: Frame) -> Frame:
    if frame.channels == 1:
        return Frame(np.ascontiguousarray(frame.pixels[:, ::-1]), frame.timestamp)
    return Frame(np.ascontiguousarray(frame.pixels[:, ::-1, :]), frame.timestamp)


def rotate(frame: Frame, degrees: float) -> Frame:
    """Rotate about the image center; outside pixels replicate the edge."""
    px = frame.pixels
    h, w = px.shape[:2]
    theta = np.deg2rad(degrees)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    dy, dx = np.meshgrid(np.arange(h) - cy, np.arange(w) - cx, indexing="ij")
    # Inverse mapping: rotate destination coordinates back into the source.
    src_x = cos_t * dx + sin_t * dy + cx
    src_y = -sin_t * dx + cos_t * dy + cy
    rotated = _sample_bilinear(px, src_y, src_x)
    return Frame(_quantize(rotated), frame.timestamp)


def augment(frame: Frame, rng_seed: int) -> Frame:
    rng = random.Random(rng_seed)
    out = frame
    if rng.random() < 0.5:
        out = flip_horizontal(out)
    angle = rng.uniform(-ROTATION_RANGE_DEG, ROTATION_RANGE_DEG)
    return rotate(out, angle)
