"""Image containers and 8-bit PNG interchange.

A *plane* is a 2-D ``float64`` array of shape ``(height, width)`` holding
intensities nominally in ``[0, 1]``. A vector field is a ``(2, height, width)``
array stacking the x and y components. Values may leave ``[0, 1]`` while the
solver runs; they are only clamped on save.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

__all__ = [
    "ImageError",
    "ImageNotFoundError",
    "ImageDecodeError",
    "UnsupportedChannelsError",
    "ImageWriteError",
    "MultiImage",
    "as_plane",
    "vector_field",
    "load_image",
    "save_image",
    "quantize",
]


class ImageError(Exception):
    """Base class for image I/O failures."""


class ImageNotFoundError(ImageError, FileNotFoundError):
    pass


class ImageDecodeError(ImageError):
    pass


class UnsupportedChannelsError(ImageError):
    pass


class ImageWriteError(ImageError, OSError):
    pass


def as_plane(data) -> np.ndarray:
    """Coerce ``data`` to a finite 2-D float64 plane."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"plane must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("plane contains non-finite values")
    return arr


def vector_field(px, py) -> np.ndarray:
    """Stack two equally sized planes into a ``(2, h, w)`` vector field."""
    px, py = as_plane(px), as_plane(py)
    if px.shape != py.shape:
        raise ValueError(f"component shapes differ: {px.shape} vs {py.shape}")
    return np.stack([px, py])


@dataclass(frozen=True)
class MultiImage:
    """One to four equally sized planes, e.g. grayscale or RGB.

    ``data`` has shape ``(channels, height, width)`` and is made read-only on
    construction.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim != 3 or arr.shape[1] == 0 or arr.shape[2] == 0:
            raise ValueError(f"expected (channels, h, w) data, got shape {arr.shape}")
        if not 1 <= arr.shape[0] <= 4:
            raise UnsupportedChannelsError(f"{arr.shape[0]} channels not supported")
        if not np.all(np.isfinite(arr)):
            raise ValueError("image contains non-finite values")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_planes(cls, planes: Sequence[np.ndarray]) -> "MultiImage":
        planes = [as_plane(p) for p in planes]
        if len({p.shape for p in planes}) != 1:
            raise ValueError("all channels must share the same dimensions")
        return cls(np.stack(planes))

    @property
    def channels(self) -> list[np.ndarray]:
        return [self.data[c] for c in range(self.data.shape[0])]

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[1], self.data.shape[2]


def load_image(path) -> MultiImage:
    """Read an 8- or 16-bit grayscale/RGB image, scaling samples to ``[0, 1]``."""
    path = Path(path)
    if not path.is_file():
        raise ImageNotFoundError(f"no such image: {path}")
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            arr = np.asarray(im)
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise ImageDecodeError(f"cannot decode {path}: {exc}") from exc

    if mode in ("L", "RGB"):
        scale = 255.0
    elif mode in ("I;16", "I;16B", "I;16L", "I"):
        # PIL reports 16-bit PNGs as "I" or "I;16"
        scale = 65535.0
    else:
        raise UnsupportedChannelsError(f"unsupported image mode {mode!r} in {path}")

    arr = arr.astype(np.float64) / scale
    if arr.ndim == 2:
        arr = arr[None]
    else:
        arr = np.moveaxis(arr, -1, 0)
    return MultiImage(arr)


def quantize(values: np.ndarray) -> np.ndarray:
    """Clamp to [0, 1] and round half up onto the 8-bit lattice."""
    v = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    return np.floor(v * 255.0 + 0.5).astype(np.uint8)


def save_image(img: MultiImage, path) -> None:
    """Write ``img`` as an 8-bit PNG (grayscale for one channel, RGB for three)."""
    path = Path(path)
    q = quantize(img.data)
    if img.n_channels == 1:
        pil = Image.fromarray(q[0])
    elif img.n_channels == 3:
        pil = Image.fromarray(np.ascontiguousarray(np.moveaxis(q, 0, -1)))
    else:
        raise UnsupportedChannelsError(f"cannot save {img.n_channels}-channel image")
    try:
        pil.save(path, format="PNG")
    except OSError as exc:
        raise ImageWriteError(f"cannot write {path}: {exc}") from exc
