"""Appearance injection: channel concat in latent space, temporal concat in
token space. Both are lossless -- every part is recoverable by slicing."""

from __future__ import annotations

import torch

from ..codec.patchify import TokenGrid


class FusionShapeError(ValueError):
    pass


def broadcast_reference(z_ref: torch.Tensor, f: int) -> torch.Tensor:
    """Repeat a single-image latent [b,1,h,w,c] across f frames."""
    if z_ref.ndim != 5 or z_ref.shape[1] != 1:
        raise FusionShapeError(f"reference latent must be [b,1,h,w,c], got {tuple(z_ref.shape)}")
    return z_ref.expand(-1, f, -1, -1, -1)


def channel_concat_appearance(
    z: torch.Tensor, z_ref: torch.Tensor, z_obj_d: torch.Tensor
) -> torch.Tensor:
    """concat_c(Z, Z_ref, Z_obj|D): [b,f,h,w,c] x3 -> [b,f,h,w,3c]."""
    for name, other in (("z_ref", z_ref), ("z_obj_d", z_obj_d)):
        if other.shape != z.shape:
            raise FusionShapeError(
                f"{name} shape {tuple(other.shape)} != noise latent {tuple(z.shape)}"
            )
    return torch.cat([z, z_ref, z_obj_d], dim=-1)


def split_channel_concat(z_cat: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    c = z_cat.shape[-1]
    if c % 3:
        raise FusionShapeError(f"channel dim {c} is not 3c")
    c //= 3
    return z_cat[..., :c], z_cat[..., c : 2 * c], z_cat[..., 2 * c :]


def token_temporal_concat(
    grid: TokenGrid, obj_grid: TokenGrid, enabled: bool = True
) -> TokenGrid:
    """Prepend the object token frame at RoPE frame index -1. With the
    ablation flag off, the grid passes through untouched."""
    if not enabled:
        return grid
    if obj_grid.video_shape[0] != 1:
        raise FusionShapeError(
            f"object grid must hold exactly 1 token frame, got {obj_grid.video_shape[0]}"
        )
    if obj_grid.video_shape[1:] != grid.video_shape[1:]:
        raise FusionShapeError(
            f"object grid {obj_grid.video_shape} does not match video grid {grid.video_shape}"
        )
    if obj_grid.tokens.shape[-1] != grid.tokens.shape[-1]:
        raise FusionShapeError("object tokens have a different model width")
    tokens = torch.cat([obj_grid.tokens, grid.tokens], dim=1)
    return TokenGrid(
        tokens=tokens,
        frame_ids=torch.cat([torch.full_like(obj_grid.frame_ids, -1), grid.frame_ids]),
        rows=torch.cat([obj_grid.rows, grid.rows]),
        cols=torch.cat([obj_grid.cols, grid.cols]),
        video_shape=grid.video_shape,
    )
