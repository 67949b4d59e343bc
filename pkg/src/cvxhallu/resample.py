"""Separable bicubic (Catmull-Rom) resampling."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = ["cubic", "resize_weights", "resize_plane", "zoom_plane"]

A = -0.5


def cubic(t):
    """Keys cubic convolution kernel with ``a = -0.5``."""
    t = np.abs(np.asarray(t, dtype=np.float64))
    t2, t3 = t * t, t * t * t
    near = (A + 2) * t3 - (A + 3) * t2 + 1
    far = A * t3 - 5 * A * t2 + 8 * A * t - 4 * A
    return np.where(t <= 1, near, np.where(t < 2, far, 0.0))


@lru_cache(maxsize=64)
def resize_weights(
    n_in: int, n_out: int, antialias: bool = True, phase: float | None = None
) -> np.ndarray:
    """``(n_out, n_in)`` interpolation matrix.

    ``phase`` is the position, in fine-grid pixels, of coarse sample 0. The
    default ``None`` is the center-aligned grid. Out-of-range taps clamp to
    the border sample. When shrinking with ``antialias`` the kernel is widened
    by the shrink factor.
    """
    ratio = n_in / n_out
    if phase is None:
        phase = (max(ratio, 1 / ratio) - 1) / 2
    stretch = ratio if (antialias and ratio > 1) else 1.0
    support = 2.0 * stretch
    m = np.zeros((n_out, n_in))
    for i in range(n_out):
        # shrinking: input is the fine grid; enlarging: output is the fine grid
        x = i * ratio + phase if ratio > 1 else (i - phase) * ratio
        lo = math.floor(x - support) + 1
        hi = math.ceil(x + support) - 1
        js = np.arange(lo, hi + 1)
        wts = cubic((x - js) / stretch)
        wts /= wts.sum()
        np.add.at(m[i], np.clip(js, 0, n_in - 1), wts)
    m.flags.writeable = False
    return m


def resize_plane(
    u: np.ndarray, out_h: int, out_w: int, antialias: bool = True, phase: float | None = None
) -> np.ndarray:
    if out_h < 1 or out_w < 1:
        raise ValueError("target dimensions must be >= 1")
    wy = resize_weights(u.shape[0], int(out_h), antialias, phase)
    wx = resize_weights(u.shape[1], int(out_w), antialias, phase)
    return wy @ u @ wx.T


def zoom_plane(u: np.ndarray, scale: int, down: bool) -> np.ndarray:
    """Integer-factor bicubic zoom on the decimation grid.

    Coarse sample ``i`` sits on fine pixel ``scale * i + scale // 2``, the same
    phase :func:`cvxhallu.linops.downsample` keeps.
    """
    h, w = u.shape
    if down:
        return resize_plane(u, h // scale, w // scale, phase=scale // 2)
    return resize_plane(u, h * scale, w * scale, phase=scale // 2)
