"""Binary token-grid masks gating where adapters may write.

Masks live at token granularity: a token is inside the mask iff its latent
patch intersects the target region for that frame. Object masks get one
token of dilation for interaction slack; face masks are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F

from ..codec.patchify import TokenGrid
from ..fusion.paste import PasteSpec, first_pixel_frame, paste_support_mask


class MaskShapeError(ValueError):
    pass


@dataclass
class MaskVolume:
    values: torch.Tensor  # [b, f_tok, h', w'] in {0, 1}

    def __post_init__(self):
        if self.values.ndim != 4:
            raise MaskShapeError(f"mask must be [b,f,h,w], got {tuple(self.values.shape)}")
        unique = torch.unique(self.values)
        if not bool(((unique == 0) | (unique == 1)).all()):
            raise MaskShapeError("mask values must be binary")

    @property
    def token_shape(self) -> tuple[int, int, int]:
        return tuple(self.values.shape[1:])

    def flat(self, grid: TokenGrid) -> torch.Tensor:
        """[b, L] mask over the grid's tokens; non-video tokens (negative
        frame ids) are always 0."""
        if self.token_shape != grid.video_shape:
            raise MaskShapeError(
                f"mask {self.token_shape} does not match grid {grid.video_shape}"
            )
        b = self.values.shape[0]
        video_flat = self.values.reshape(b, -1)
        flat = torch.zeros(b, grid.num_tokens, dtype=self.values.dtype)
        flat[:, grid.video_token_mask()] = video_flat
        return flat

    @classmethod
    def zeros(cls, b: int, f: int, h: int, w: int) -> "MaskVolume":
        return cls(torch.zeros(b, f, h, w))

    @classmethod
    def ones(cls, b: int, f: int, h: int, w: int) -> "MaskVolume":
        return cls(torch.ones(b, f, h, w))


def _pool_to_tokens(cell_mask: np.ndarray, patch_size: int) -> torch.Tensor:
    """[f, h, w] latent-cell mask -> [f, h/p, w/p] token mask (any-cell rule)."""
    f, h, w = cell_mask.shape
    p = patch_size
    m = cell_mask.reshape(f, h // p, p, w // p, p)
    return torch.from_numpy(m.any(axis=(2, 4)).astype(np.float32))


def _dilate(mask: torch.Tensor, radius: int) -> torch.Tensor:
    if radius == 0:
        return mask
    kernel = 2 * radius + 1
    return F.max_pool2d(mask, kernel_size=kernel, stride=1, padding=radius)


def build_object_mask(
    spec: PasteSpec,
    token_geometry: tuple[int, int, int],
    patch_size: int,
    batch: int = 1,
    dilation: int = 1,
) -> MaskVolume:
    """Token is set iff its latent patch intersects the paste rectangle for
    that frame, then dilated by `dilation` tokens spatially."""
    f, hp, wp = token_geometry
    cells = paste_support_mask(spec, f, hp * patch_size, wp * patch_size)
    tokens = _pool_to_tokens(cells, patch_size)
    tokens = _dilate(tokens, dilation)
    return MaskVolume(tokens[None].expand(batch, -1, -1, -1).clone())


def build_face_mask(
    face_boxes: np.ndarray,
    token_geometry: tuple[int, int, int],
    patch_size: int,
    batch: int = 1,
) -> MaskVolume:
    """Per-frame normalized face boxes [n, 4] (cx, cy, w, h) -> token mask.
    Each latent frame uses the box of its window's first pixel frame."""
    f, hp, wp = token_geometry
    boxes = np.asarray(face_boxes, dtype=np.float64)
    h_lat, w_lat = hp * patch_size, wp * patch_size
    cells = np.zeros((f, h_lat, w_lat), dtype=bool)
    n = boxes.shape[0]
    for i in range(f):
        cx, cy, bw, bh = boxes[min(first_pixel_frame(i), n - 1)]
        c0 = int(np.floor((cx - bw / 2) * w_lat))
        c1 = int(np.ceil((cx + bw / 2) * w_lat))
        r0 = int(np.floor((cy - bh / 2) * h_lat))
        r1 = int(np.ceil((cy + bh / 2) * h_lat))
        cells[i, max(r0, 0) : max(min(r1, h_lat), 0), max(c0, 0) : max(min(c1, w_lat), 0)] = True
    tokens = _pool_to_tokens(cells, patch_size)
    return MaskVolume(tokens[None].expand(batch, -1, -1, -1).clone())
