"""Regenerate the bundled 100x100 face crops from scikit-image sample data."""

from pathlib import Path

import numpy as np
import skimage.data
from PIL import Image

OUT = Path(__file__).resolve().parents[1] / "src" / "cvxhallu" / "data" / "faces"

# (name, loader, top, left, side)
CROPS = [
    ("astronaut", skimage.data.astronaut, 20, 125, 200),
    ("astronaut_tight", skimage.data.astronaut, 60, 165, 120),
    ("cameraman", skimage.data.camera, 50, 140, 180),
    ("cameraman_tight", skimage.data.camera, 100, 165, 110),
    ("chelsea", skimage.data.chelsea, 20, 60, 280),
]


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for name, loader, top, left, side in CROPS:
        img = np.asarray(loader())[top : top + side, left : left + side]
        crop = Image.fromarray(img).resize((100, 100), Image.Resampling.LANCZOS)
        crop.save(OUT / f"{name}.png")
        print(OUT / f"{name}.png", crop.mode, crop.size)


if __name__ == "__main__":
    main()
