"""Object-image augmentation: random scale, rotation, and position shift.

Transforms are applied about the image center with bilinear sampling and
clamp-to-edge boundaries. Parameter sampling is split from application so
inverse transforms can be tested directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SCALE_RANGE = (0.8, 1.2)
ROTATION_RANGE_DEG = (-15.0, 15.0)
MAX_SHIFT_FRAC = 0.10


@dataclass(frozen=True)
class AugmentParams:
    scale: float = 1.0
    rotation_deg: float = 0.0
    shift: tuple[float, float] = (0.0, 0.0)  # (dx, dy) as fraction of side


def sample_augment_params(rng: np.random.Generator) -> AugmentParams:
    return AugmentParams(
        scale=float(rng.uniform(*SCALE_RANGE)),
        rotation_deg=float(rng.uniform(*ROTATION_RANGE_DEG)),
        shift=(
            float(rng.uniform(-MAX_SHIFT_FRAC, MAX_SHIFT_FRAC)),
            float(rng.uniform(-MAX_SHIFT_FRAC, MAX_SHIFT_FRAC)),
        ),
    )


def apply_augment(image: np.ndarray, params: AugmentParams) -> np.ndarray:
    """Similarity transform of [H, W, 3] about the center, bilinear sampling."""
    if params == AugmentParams():
        return image.copy()
    height, width = image.shape[:2]
    cy, cx = (height - 1) / 2.0, (width - 1) / 2.0
    theta = np.deg2rad(params.rotation_deg)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    tx = params.shift[0] * width
    ty = params.shift[1] * height

    ys, xs = np.meshgrid(np.arange(height, dtype=np.float64),
                         np.arange(width, dtype=np.float64), indexing="ij")
    # Inverse map: undo shift, rotate back, unscale.
    dx = xs - cx - tx
    dy = ys - cy - ty
    src_x = (cos_t * dx + sin_t * dy) / params.scale + cx
    src_y = (-sin_t * dx + cos_t * dy) / params.scale + cy

    x0 = np.clip(np.floor(src_x).astype(int), 0, width - 1)
    y0 = np.clip(np.floor(src_y).astype(int), 0, height - 1)
    x1 = np.clip(x0 + 1, 0, width - 1)
    y1 = np.clip(y0 + 1, 0, height - 1)
    wx = np.clip(src_x - x0, 0.0, 1.0)[..., None]
    wy = np.clip(src_y - y0, 0.0, 1.0)[..., None]

    img = image.astype(np.float64)
    top = img[y0, x0] * (1 - wx) + img[y0, x1] * wx
    bottom = img[y1, x0] * (1 - wx) + img[y1, x1] * wx
    return (top * (1 - wy) + bottom * wy).astype(image.dtype)


def augment_object(image: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return apply_augment(image, sample_augment_params(rng))
