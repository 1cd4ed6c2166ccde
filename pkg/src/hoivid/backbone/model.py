"""Miniature double-stream video diffusion transformer.

Predicts a velocity field over latent patches from a noisy latent, a text
branch, and a timestep. `forward_tokens` exposes the block loop with an
optional per-layer hook, which is how adapters interleave without forking
the forward path.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from ..codec.patchify import PatchEmbed, TokenGrid, tokens_to_space
from .blocks import DoubleStreamBlock, FinalLayer, TimestepEmbedding
from .config import BackboneConfig
from .rope import rope_phases
from .store import ParameterStore


class VideoBackbone(nn.Module):
    def __init__(self, config: BackboneConfig | None = None):
        super().__init__()
        self.config = config or BackboneConfig()
        cfg = self.config
        self.patch_embed = PatchEmbed(cfg.in_channels, cfg.patch_size, cfg.d_model)
        self.text_proj = nn.Linear(cfg.text_dim, cfg.d_model)
        self.t_embed = TimestepEmbedding(cfg.d_model)
        self.blocks = nn.ModuleList(
            [DoubleStreamBlock(cfg.d_model, cfg.n_heads) for _ in range(cfg.n_layers)]
        )
        self.final = FinalLayer(cfg.d_model, cfg.patch_size**2 * cfg.latent_channels)

    @property
    def store(self) -> ParameterStore:
        return ParameterStore(self)

    def token_phases(self, grid: TokenGrid) -> torch.Tensor:
        return rope_phases(
            grid.frame_ids, grid.rows, grid.cols, self.config.d_head, self.config.rope_theta
        )

    def time_vector(self, t, batch: int) -> torch.Tensor:
        vec = self.t_embed(t)
        if vec.shape[0] == 1 and batch > 1:
            vec = vec.expand(batch, -1)
        return vec

    def embed_text(self, text_tokens: torch.Tensor) -> torch.Tensor:
        return self.text_proj(text_tokens)

    def forward_tokens(
        self,
        grid: TokenGrid,
        txt: torch.Tensor,
        t_vec: torch.Tensor,
        per_layer_fn=None,
    ) -> torch.Tensor:
        if grid.video_shape[0] > self.config.max_frames:
            raise ValueError(
                f"{grid.video_shape[0]} token frames exceed max_frames={self.config.max_frames}"
            )
        phases = self.token_phases(grid)
        img = grid.tokens
        for i, block in enumerate(self.blocks):
            img, txt = block(img, txt, t_vec, phases)
            if per_layer_fn is not None:
                img = per_layer_fn(i, img)
        return img

    def head(self, img: torch.Tensor, grid: TokenGrid, t_vec: torch.Tensor) -> torch.Tensor:
        """Video tokens -> velocity latent [b, f, h, w, latent_channels]."""
        mask = grid.video_token_mask()
        if not bool(mask.all()):
            img = img[:, mask]
        out = self.final(img, t_vec)
        f, hp, wp = grid.video_shape
        p = self.config.patch_size
        return tokens_to_space(out, f, hp * p, wp * p, p, self.config.latent_channels)

    def forward(self, z: torch.Tensor, text_tokens: torch.Tensor, t) -> torch.Tensor:
        grid = self.patch_embed(z)
        t_vec = self.time_vector(t, z.shape[0])
        txt = self.embed_text(text_tokens)
        img = self.forward_tokens(grid, txt, t_vec)
        return self.head(img, grid, t_vec)

    def expand_input_channels(self, new_channels: int) -> None:
        from dataclasses import replace

        self.patch_embed.expand_input_channels(new_channels)
        self.config = replace(self.config, in_channels=new_channels)
