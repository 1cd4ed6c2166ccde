"""Latent <-> token-grid mapping with per-token (frame, row, col) metadata.

The reshape between latent patches and flat token vectors is a pure
bijection; the learned projection lives in `PatchEmbed` so identity weights
make the full round trip exact.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import torch
import torch.nn as nn


class PatchShapeError(ValueError):
    pass


@dataclass
class TokenGrid:
    tokens: torch.Tensor  # [b, L, d_model]
    frame_ids: torch.Tensor  # [L] int64, may be negative for condition tokens
    rows: torch.Tensor  # [L] int64
    cols: torch.Tensor  # [L] int64
    video_shape: tuple[int, int, int]  # (f_tok, h', w') of the video-token block

    def __post_init__(self):
        L = self.tokens.shape[1]
        if not (len(self.frame_ids) == len(self.rows) == len(self.cols) == L):
            raise PatchShapeError("token index metadata must match token count")

    @property
    def num_tokens(self) -> int:
        return int(self.tokens.shape[1])

    def video_token_mask(self) -> torch.Tensor:
        return self.frame_ids >= 0

    def with_tokens(self, tokens: torch.Tensor) -> "TokenGrid":
        return replace(self, tokens=tokens)


def build_token_indices(f: int, h: int, w: int) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Row-major (frame, row, col) triples for token k = (frame*h + row)*w + col."""
    frame_ids = torch.arange(f).repeat_interleave(h * w)
    rows = torch.arange(h).repeat_interleave(w).repeat(f)
    cols = torch.arange(w).repeat(f * h)
    return frame_ids, rows, cols


def token_index(frame: int, row: int, col: int, h: int, w: int) -> int:
    return (frame * h + row) * w + col


def space_to_tokens(z: torch.Tensor, patch_size: int) -> torch.Tensor:
    """[b, f, h, w, c] -> [b, f*(h/p)*(w/p), c*p*p], pure reshape."""
    b, f, h, w, c = z.shape
    p = patch_size
    if h % p or w % p:
        raise PatchShapeError(f"latent {h}x{w} not divisible by patch size {p}")
    z = z.reshape(b, f, h // p, p, w // p, p, c)
    z = z.permute(0, 1, 2, 4, 3, 5, 6)  # b, f, h', w', p, p, c
    return z.reshape(b, f * (h // p) * (w // p), p * p * c)


def tokens_to_space(x: torch.Tensor, f: int, h: int, w: int, patch_size: int, channels: int) -> torch.Tensor:
    """Inverse of space_to_tokens."""
    b = x.shape[0]
    p = patch_size
    hp, wp = h // p, w // p
    x = x.reshape(b, f, hp, wp, p, p, channels)
    x = x.permute(0, 1, 2, 4, 3, 5, 6)
    return x.reshape(b, f, h, w, channels)


class PatchEmbed(nn.Module):
    """Linear projection of latent patches into the model width."""

    def __init__(self, latent_channels: int, patch_size: int, d_model: int):
        super().__init__()
        self.latent_channels = latent_channels
        self.patch_size = patch_size
        self.proj = nn.Linear(latent_channels * patch_size**2, d_model)

    @property
    def in_channels(self) -> int:
        return self.latent_channels

    def forward(self, z: torch.Tensor) -> TokenGrid:
        b, f, h, w, c = z.shape
        if c != self.latent_channels:
            raise PatchShapeError(f"expected {self.latent_channels} channels, got {c}")
        tokens = self.proj(space_to_tokens(z, self.patch_size))
        hp, wp = h // self.patch_size, w // self.patch_size
        frame_ids, rows, cols = build_token_indices(f, hp, wp)
        return TokenGrid(tokens, frame_ids, rows, cols, (f, hp, wp))

    def expand_input_channels(self, new_channels: int) -> None:
        """Widen the patch projection to more latent channels; new input
        columns are zero so behavior on the old channels is unchanged."""
        if new_channels < self.latent_channels:
            raise PatchShapeError("can only expand, not shrink, input channels")
        old = self.proj
        p2 = self.patch_size**2
        new = nn.Linear(new_channels * p2, old.out_features)
        with torch.no_grad():
            new.weight.zero_()
            # space_to_tokens flattens (p, p, c) with channels fastest, so old
            # channel columns interleave at stride new_channels.
            w_old = old.weight.reshape(old.out_features, p2, self.latent_channels)
            new.weight.reshape(old.out_features, p2, new_channels)[
                :, :, : self.latent_channels
            ].copy_(w_old)
            new.bias.copy_(old.bias)
        self.proj = new
        self.latent_channels = new_channels
