"""Trajectory-aligned object pasting in latent space.

The object latent is resized to the requested paste footprint and stamped
into an otherwise-zero latent at per-frame centers derived from the dot
trajectory; out-of-bounds paste rectangles are clipped. The paste footprint
is what implicitly controls the generated object's scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F

from ..codec.vae import TEMPORAL_FACTOR
from ..conditions import ObjectMotion


class PasteError(ValueError):
    pass


@dataclass(frozen=True)
class PasteSpec:
    centers: np.ndarray  # [f, 2] int (row, col) in latent coordinates
    size: tuple[int, int]  # (h_p, w_p), >= 1 each
    start_frame: int = 0  # latent frames before this get no paste

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=np.int64)
        object.__setattr__(self, "centers", centers)
        if centers.ndim != 2 or centers.shape[1] != 2:
            raise PasteError(f"centers must be [f,2], got {centers.shape}")
        if self.size[0] < 1 or self.size[1] < 1:
            raise PasteError(f"degenerate paste size {self.size}")


def first_pixel_frame(latent_frame: int) -> int:
    """Pixel frame whose conditions stand in for a latent frame: frame 0 for
    latent frame 0, then the first frame of each 4-frame window."""
    if latent_frame == 0:
        return 0
    return TEMPORAL_FACTOR * (latent_frame - 1) + 1


def paste_spec_from_motion(
    motion: ObjectMotion,
    paste_size: tuple[float, float],
    latent_geometry: tuple[int, int, int],
    fix_copy: bool = False,
    start_frame: int = 0,
) -> PasteSpec:
    f, h, w = latent_geometry
    n = motion.n
    centers = np.zeros((f, 2), dtype=np.int64)
    norm_centers = motion.centers()
    for i in range(f):
        if fix_copy:
            centers[i] = (h // 2, w // 2)
            continue
        px = norm_centers[min(first_pixel_frame(i), n - 1)]
        col = int(np.clip(np.rint(px[0] * w), 0, w - 1))
        row = int(np.clip(np.rint(px[1] * h), 0, h - 1))
        centers[i] = (row, col)
    w_norm, h_norm = paste_size
    size = (max(1, int(np.rint(h_norm * h))), max(1, int(np.rint(w_norm * w))))
    return PasteSpec(centers=centers, size=size, start_frame=start_frame)


def resize_object_latent(z_obj: torch.Tensor, size: tuple[int, int]) -> torch.Tensor:
    """Bilinear resize of a single-frame latent [b, 1, h_o, w_o, c]."""
    if z_obj.ndim != 5 or z_obj.shape[1] != 1:
        raise PasteError(f"object latent must be [b,1,h,w,c], got {tuple(z_obj.shape)}")
    x = z_obj[:, 0].permute(0, 3, 1, 2)
    x = F.interpolate(x, size=size, mode="bilinear", align_corners=False)
    return x.permute(0, 2, 3, 1)[:, None]


def paste_object_along_trajectory(
    z_obj: torch.Tensor, spec: PasteSpec, f: int, h: int, w: int
) -> torch.Tensor:
    """[b,1,h_o,w_o,c] object latent -> [b,f,h,w,c] trajectory paste."""
    if spec.centers.shape[0] != f:
        raise PasteError(f"spec covers {spec.centers.shape[0]} frames, latent has {f}")
    h_p, w_p = spec.size
    if h_p < 1 or w_p < 1:
        raise PasteError(f"degenerate paste size {spec.size}")
    patch = resize_object_latent(z_obj, (h_p, w_p))[:, 0]  # [b, h_p, w_p, c]
    b, c = patch.shape[0], patch.shape[-1]
    out = torch.zeros(b, f, h, w, c, dtype=z_obj.dtype, device=z_obj.device)
    for i in range(f):
        if i < spec.start_frame:
            continue
        row, col = int(spec.centers[i, 0]), int(spec.centers[i, 1])
        r0, c0 = row - h_p // 2, col - w_p // 2
        rr0, cc0 = max(r0, 0), max(c0, 0)
        rr1, cc1 = min(r0 + h_p, h), min(c0 + w_p, w)
        if rr0 >= rr1 or cc0 >= cc1:
            continue
        out[:, i, rr0:rr1, cc0:cc1] = patch[:, rr0 - r0 : rr1 - r0, cc0 - c0 : cc1 - c0]
    return out


def paste_support_mask(spec: PasteSpec, f: int, h: int, w: int) -> np.ndarray:
    """Boolean [f, h, w] mask of the paste rectangles (the oracle geometry)."""
    mask = np.zeros((f, h, w), dtype=bool)
    h_p, w_p = spec.size
    for i in range(f):
        if i < spec.start_frame:
            continue
        row, col = int(spec.centers[i, 0]), int(spec.centers[i, 1])
        r0, c0 = row - h_p // 2, col - w_p // 2
        mask[i, max(r0, 0) : min(r0 + h_p, h), max(c0, 0) : min(c0 + w_p, w)] = True
    return mask
