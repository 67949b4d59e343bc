"""Linear operators of the hallucination energy and their exact adjoints.

Every forward map ``T`` here has a partner ``T_adjoint`` with
``<T x, y> == <x, T_adjoint y>`` up to rounding. Planes are ``(h, w)`` arrays
indexed ``[row, column]``; vector fields are ``(2, h, w)`` with the x (column)
derivative first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

__all__ = [
    "GaussianKernel",
    "DegradationModel",
    "OperatorNormError",
    "grad",
    "div",
    "make_kernel",
    "blur",
    "blur_adjoint",
    "downsample",
    "downsample_adjoint",
    "apply_A",
    "apply_At",
    "highpass",
    "highpass_adjoint",
    "estimate_op_norm",
]

SAFETY = 1.01


class OperatorNormError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# gradient / divergence


def grad(u: np.ndarray) -> np.ndarray:
    """Forward differences with a Neumann boundary (zero in last column/row)."""
    out = np.zeros((2,) + u.shape)
    out[0, :, :-1] = u[:, 1:] - u[:, :-1]
    out[1, :-1, :] = u[1:, :] - u[:-1, :]
    return out


def div(p: np.ndarray) -> np.ndarray:
    """Backward-difference divergence, the negative adjoint of :func:`grad`."""
    px, py = p[0], p[1]
    out = np.zeros(px.shape)
    # the last column of px and last row of py never enter grad, so they are ignored
    out[:, :-1] += px[:, :-1]
    out[:, 1:] -= px[:, :-1]
    out[:-1, :] += py[:-1, :]
    out[1:, :] -= py[:-1, :]
    return out


# ---------------------------------------------------------------------------
# Gaussian blur


@dataclass(frozen=True)
class GaussianKernel:
    sigma: float
    radius: int
    taps: tuple[float, ...]

    def __post_init__(self):
        if len(self.taps) != 2 * self.radius + 1:
            raise ValueError("taps length must be 2*radius+1")


def make_kernel(scale: int) -> GaussianKernel:
    """Anti-alias kernel for integer zoom ``scale``: sigma = sqrt(scale**2 - 1) / 4."""
    if int(scale) != scale or scale < 2:
        raise ValueError(f"scale must be an integer >= 2, got {scale}")
    sigma = 0.25 * math.sqrt(scale * scale - 1)
    radius = max(1, math.ceil(3 * sigma))
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(t * t) / (2 * sigma * sigma))
    taps /= taps.sum()
    # enforce exact symmetry after normalization
    taps = 0.5 * (taps + taps[::-1])
    return GaussianKernel(sigma=sigma, radius=radius, taps=tuple(float(v) for v in taps))


@lru_cache(maxsize=64)
def _blur_matrix(n: int, taps: tuple[float, ...]) -> np.ndarray:
    """1-D replicate-boundary convolution as an explicit ``(n, n)`` matrix."""
    r = len(taps) // 2
    m = np.zeros((n, n))
    rows = np.arange(n)
    for k, tap in enumerate(taps):
        cols = np.clip(rows + k - r, 0, n - 1)
        np.add.at(m, (rows, cols), tap)
    m.flags.writeable = False
    return m


def blur(u: np.ndarray, k: GaussianKernel) -> np.ndarray:
    """Separable Gaussian blur with clamp-to-edge boundary."""
    my = _blur_matrix(u.shape[0], k.taps)
    mx = _blur_matrix(u.shape[1], k.taps)
    return my @ u @ mx.T


def blur_adjoint(v: np.ndarray, k: GaussianKernel) -> np.ndarray:
    """Exact transpose of :func:`blur` (scatters mass that was clamped at edges)."""
    my = _blur_matrix(v.shape[0], k.taps)
    mx = _blur_matrix(v.shape[1], k.taps)
    return my.T @ v @ mx


def highpass(u: np.ndarray, k: GaussianKernel) -> np.ndarray:
    return u - blur(u, k)


def highpass_adjoint(v: np.ndarray, k: GaussianKernel) -> np.ndarray:
    return v - blur_adjoint(v, k)


# ---------------------------------------------------------------------------
# decimation


def _check_divisible(shape, scale):
    if shape[0] % scale or shape[1] % scale:
        raise ValueError(f"plane shape {shape} not divisible by scale {scale}")


def downsample(u: np.ndarray, scale: int) -> np.ndarray:
    """Keep the sample at offset ``scale // 2`` inside every ``scale`` x ``scale`` block."""
    _check_divisible(u.shape, scale)
    off = scale // 2
    return u[off::scale, off::scale].copy()


def downsample_adjoint(f: np.ndarray, scale: int) -> np.ndarray:
    off = scale // 2
    out = np.zeros((f.shape[0] * scale, f.shape[1] * scale))
    out[off::scale, off::scale] = f
    return out


# ---------------------------------------------------------------------------
# degradation model A = D B


@dataclass(frozen=True)
class DegradationModel:
    """Blur-then-decimate observation model tying the kernel to the zoom factor."""

    scale: int
    kernel: GaussianKernel
    lr_height: int
    lr_width: int

    @classmethod
    def for_lr(cls, scale: int, lr_shape: tuple[int, int]) -> "DegradationModel":
        return cls(int(scale), make_kernel(scale), int(lr_shape[0]), int(lr_shape[1]))

    @classmethod
    def for_hr(cls, scale: int, hr_shape: tuple[int, int]) -> "DegradationModel":
        _check_divisible(hr_shape, scale)
        return cls.for_lr(scale, (hr_shape[0] // scale, hr_shape[1] // scale))

    @property
    def lr_shape(self) -> tuple[int, int]:
        return self.lr_height, self.lr_width

    @property
    def hr_shape(self) -> tuple[int, int]:
        return self.lr_height * self.scale, self.lr_width * self.scale

    @property
    def hr_height(self) -> int:
        return self.lr_height * self.scale

    @property
    def hr_width(self) -> int:
        return self.lr_width * self.scale


def apply_A(u: np.ndarray, model: DegradationModel) -> np.ndarray:
    if u.shape != model.hr_shape:
        raise ValueError(f"expected HR shape {model.hr_shape}, got {u.shape}")
    return downsample(blur(u, model.kernel), model.scale)


def apply_At(f: np.ndarray, model: DegradationModel) -> np.ndarray:
    if f.shape != model.lr_shape:
        raise ValueError(f"expected LR shape {model.lr_shape}, got {f.shape}")
    return blur_adjoint(downsample_adjoint(f, model.scale), model.kernel)


# ---------------------------------------------------------------------------
# operator norm


def estimate_op_norm(
    apply_ktk: Callable[[np.ndarray], np.ndarray],
    size: int,
    iters: int = 200,
    seed: int = 0,
) -> float:
    """Upper estimate of ``||K||`` by power iteration on ``K^T K``.

    ``apply_ktk`` acts on flat vectors of length ``size``. The largest Rayleigh
    quotient seen is square-rooted and inflated by 1 %.
    """
    if iters < 20:
        raise ValueError("power iteration needs at least 20 iterations")
    rng = np.random.default_rng(seed)
    for attempt in range(2):
        x = rng.standard_normal(size)
        x /= np.linalg.norm(x)
        y = apply_ktk(x)
        if np.linalg.norm(y) > 0:
            break
    else:
        raise OperatorNormError("K^T K annihilated two random start vectors")

    best = 0.0
    for _ in range(iters):
        rq = float(x @ y)
        best = max(best, rq)
        ny = np.linalg.norm(y)
        if ny == 0:
            break
        x = y / ny
        y = apply_ktk(x)
    best = max(best, float(x @ y))
    return math.sqrt(best) * SAFETY
