"""End-to-end super-resolution runs: degradation, candidates, per-channel solves."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .image_core import MultiImage, load_image
from .linops import DegradationModel
from .pd_solver import SolveDiagnostics, SolverConfig, solve
from .resample import resize_plane, zoom_plane

__all__ = [
    "CandidateSet",
    "bicubic_resize",
    "degrade",
    "shift_replicate",
    "synth_candidates",
    "load_candidates",
    "hallucinate",
]

DEFAULT_CANDIDATES = 6


@dataclass(frozen=True)
class CandidateSet:
    """Pre-aligned HR exemplars; their order fixes the candidate index."""

    images: tuple[MultiImage, ...]
    sources: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.images:
            raise ValueError("candidate set is empty")
        if len({im.data.shape for im in self.images}) != 1:
            raise ValueError("candidates must share one shape and channel count")

    def __len__(self) -> int:
        return len(self.images)

    @property
    def shape(self) -> tuple[int, int]:
        return self.images[0].shape

    @property
    def n_channels(self) -> int:
        return self.images[0].n_channels

    def channel(self, c: int) -> list[np.ndarray]:
        return [im.data[c] for im in self.images]


def bicubic_resize(img: MultiImage, out_w: int, out_h: int) -> MultiImage:
    """Catmull-Rom resize of every channel (antialiased when shrinking)."""
    return MultiImage(np.stack([resize_plane(p, out_h, out_w) for p in img.data]))


def degrade(hr: MultiImage, scale: int) -> tuple[MultiImage, MultiImage]:
    """Bicubic downsample by ``scale`` and the bicubic re-upsampled baseline.

    Both steps run on the decimation grid (LR sample ``i`` at HR pixel
    ``scale * i + scale // 2``) so the LR image is registered with the
    solver's observation model.
    """
    h, w = hr.shape
    if h % scale or w % scale:
        raise ValueError(f"HR size {w}x{h} not divisible by scale {scale}")
    lr = MultiImage(np.stack([zoom_plane(p, scale, down=True) for p in hr.data]))
    up = MultiImage(np.stack([zoom_plane(p, scale, down=False) for p in lr.data]))
    return lr, up


def shift_replicate(plane: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """Translate so that ``out[i, j] = plane[i - dy, j - dx]``, clamping at the edges."""
    h, w = plane.shape
    rows = np.clip(np.arange(h) - dy, 0, h - 1)
    cols = np.clip(np.arange(w) - dx, 0, w - 1)
    return plane[np.ix_(rows, cols)]


def synth_candidates(
    hr: MultiImage,
    k: int = DEFAULT_CANDIDATES,
    max_shift: int = 2,
    noise_sigma: float = 0.01,
    seed: int = 0,
) -> CandidateSet:
    """Stand-in for aligned database matches: jittered, noisy copies of ``hr``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed)
    images = []
    sources = []
    for i in range(k):
        dx, dy = (int(v) for v in rng.integers(-max_shift, max_shift + 1, size=2))
        noise = rng.normal(0.0, noise_sigma, size=hr.data.shape) if noise_sigma > 0 else 0.0
        shifted = np.stack([shift_replicate(p, dx, dy) for p in hr.data])
        images.append(MultiImage(shifted + noise))
        sources.append(f"synthetic:{i}:shift=({dx},{dy}):noise={noise_sigma}")
    return CandidateSet(tuple(images), tuple(sources))


def load_candidates(paths: Sequence[str]) -> CandidateSet:
    return CandidateSet(tuple(load_image(p) for p in paths), tuple(str(p) for p in paths))


def hallucinate(
    lr: MultiImage,
    candidates: CandidateSet,
    scale: int,
    cfg: SolverConfig = SolverConfig(),
    workers: int = 1,
) -> tuple[MultiImage, list[SolveDiagnostics]]:
    """Solve each channel independently and reassemble the HR image."""
    if lr.n_channels != candidates.n_channels:
        raise ValueError(
            f"channel mismatch: lr has {lr.n_channels}, candidates have {candidates.n_channels}"
        )
    model = DegradationModel.for_lr(scale, lr.shape)
    if candidates.shape != model.hr_shape:
        raise ValueError(f"candidates are {candidates.shape}, expected {model.hr_shape}")

    def run(c: int):
        return solve(lr.data[c], candidates.channel(c), model, cfg)

    if workers > 1 and lr.n_channels > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(lr.n_channels)))
    else:
        results = [run(c) for c in range(lr.n_channels)]
    return MultiImage(np.stack([u for u, _ in results])), [d for _, d in results]
