"""PSNR and single-scale SSIM on [0, 1] images."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image_core import MultiImage

__all__ = ["QualityReport", "psnr", "ssim", "quality", "gaussian_window"]

K1, K2 = 0.01, 0.03
WIN, WIN_SIGMA = 11, 1.5


def _pair(a: MultiImage, b: MultiImage) -> tuple[np.ndarray, np.ndarray]:
    if a.data.shape != b.data.shape:
        raise ValueError(f"image shapes differ: {a.data.shape} vs {b.data.shape}")
    return np.clip(a.data, 0.0, 1.0), np.clip(b.data, 0.0, 1.0)


def _psnr(x: np.ndarray, y: np.ndarray) -> float:
    mse = float(np.mean((x - y) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(1.0 / mse)


def psnr(a: MultiImage, b: MultiImage) -> float:
    """PSNR in dB with peak 1, MSE pooled over all channels. ``inf`` if identical."""
    x, y = _pair(a, b)
    return _psnr(x, y)


def gaussian_window(size: int = WIN, sigma: float = WIN_SIGMA) -> np.ndarray:
    t = np.arange(size) - (size - 1) / 2
    g = np.exp(-(t * t) / (2 * sigma * sigma))
    return g / g.sum()


def _filter_valid(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    # separable 'valid' correlation
    k = len(g)
    rows = sum(g[i] * x[i : x.shape[0] - k + 1 + i, :] for i in range(k))
    return sum(g[j] * rows[:, j : rows.shape[1] - k + 1 + j] for j in range(k))


def _ssim_plane(x: np.ndarray, y: np.ndarray) -> float:
    g = gaussian_window()
    c1, c2 = K1**2, K2**2
    mx, my = _filter_valid(x, g), _filter_valid(y, g)
    sxx = _filter_valid(x * x, g) - mx * mx
    syy = _filter_valid(y * y, g) - my * my
    sxy = _filter_valid(x * y, g) - mx * my
    num = (2 * mx * my + c1) * (2 * sxy + c2)
    den = (mx * mx + my * my + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))


def ssim(a: MultiImage, b: MultiImage) -> float:
    """Mean SSIM over all valid 11x11 Gaussian windows and channels."""
    x, y = _pair(a, b)
    if x.shape[1] < WIN or x.shape[2] < WIN:
        raise ValueError(f"SSIM needs at least {WIN}x{WIN} pixels")
    if np.array_equal(x, y):
        return 1.0
    return float(np.mean([_ssim_plane(x[c], y[c]) for c in range(x.shape[0])]))


@dataclass(frozen=True)
class QualityReport:
    psnr_db: float
    ssim: float
    channel_psnr_db: tuple[float, ...]
    channel_ssim: tuple[float, ...]

    def lines(self) -> list[str]:
        return [f"psnr_db={_fmt_db(self.psnr_db)}", f"ssim={self.ssim:.6f}"]


def _fmt_db(v: float) -> str:
    return "inf" if np.isinf(v) else f"{v:.4f}"


def quality(result: MultiImage, truth: MultiImage) -> QualityReport:
    planes = [(MultiImage(r), MultiImage(t)) for r, t in zip(result.data, truth.data)]
    return QualityReport(
        psnr_db=psnr(result, truth),
        ssim=ssim(result, truth),
        channel_psnr_db=tuple(psnr(r, t) for r, t in planes),
        channel_ssim=tuple(ssim(r, t) for r, t in planes),
    )
