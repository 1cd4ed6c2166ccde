"""Motion context fusion: separate one-layer encoders, additive merge.

Each encoder is a single convolution mapping the codec's c channels to the
3c channel-concat width. Encoders start zero-initialized so enabling a new
motion condition leaves the pretrained function untouched until trained.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from .appearance import FusionShapeError


class MotionEncoder(nn.Module):
    """Single conv layer projecting a condition latent into the fused width."""

    def __init__(self, latent_channels: int, out_channels: int):
        super().__init__()
        self.conv = nn.Conv3d(
            latent_channels, out_channels, kernel_size=(1, 3, 3), padding=(0, 1, 1)
        )
        nn.init.zeros_(self.conv.weight)
        nn.init.zeros_(self.conv.bias)

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        return self.conv(z.permute(0, 4, 1, 2, 3)).permute(0, 2, 3, 4, 1)


def motion_fuse(z_cat: torch.Tensor, *encoded_terms: torch.Tensor) -> torch.Tensor:
    """Elementwise sum of the appearance latent and encoded motion latents."""
    out = z_cat
    for term in encoded_terms:
        if term.shape != z_cat.shape:
            raise FusionShapeError(
                f"motion term shape {tuple(term.shape)} != {tuple(z_cat.shape)}"
            )
        out = out + term
    return out
