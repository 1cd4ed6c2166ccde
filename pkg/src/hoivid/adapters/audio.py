"""Speech injection: per-latent-frame audio tokens and face-gated
cross-attention on even layers.

Video tokens of latent frame j attend only to audio token j (their own
window), so lip motion cannot read future or past audio. With one key per
query the softmax is trivially 1 and the update reduces to the value
projection, which starts at zero so attaching the adapter is a no-op until
trained.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn

from ..codec.vae import TEMPORAL_FACTOR, latent_frames
from .hoi import AdapterError


class AudioProjector(nn.Module):
    """Window-mean of pixel-frame features, then a 2-layer MLP to d_model."""

    def __init__(self, feature_dim: int, d_model: int):
        super().__init__()
        self.feature_dim = feature_dim
        self.fc1 = nn.Linear(feature_dim, d_model)
        self.fc2 = nn.Linear(d_model, d_model)
        nn.init.zeros_(self.fc1.bias)
        nn.init.zeros_(self.fc2.bias)

    @staticmethod
    def window_mean(features: torch.Tensor) -> torch.Tensor:
        """[b, n, dim] pixel-frame features -> [b, f, dim] latent-frame means
        over windows {0}, {1..4}, {5..8}, ..."""
        b, n, dim = features.shape
        f = latent_frames(n)
        out = torch.zeros(b, f, dim, dtype=features.dtype, device=features.device)
        out[:, 0] = features[:, 0]
        for j in range(1, f):
            lo = TEMPORAL_FACTOR * (j - 1) + 1
            out[:, j] = features[:, lo : lo + TEMPORAL_FACTOR].mean(dim=1)
        return out

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        if features.ndim != 3 or features.shape[-1] != self.feature_dim:
            raise AdapterError(
                f"audio features must be [b, n, {self.feature_dim}], got {tuple(features.shape)}"
            )
        pooled = self.window_mean(features)
        return self.fc2(torch.nn.functional.silu(self.fc1(pooled)))


class FaceCrossAttention(nn.Module):
    """H + mask * softmax(Q_H K_A^T / sqrt(d)) V_A, frame-diagonal."""

    def __init__(self, d_model: int, n_heads: int):
        super().__init__()
        self.d_model = d_model
        self.n_heads = n_heads
        self.d_head = d_model // n_heads
        self.w_q = nn.Linear(d_model, d_model)
        self.w_k = nn.Linear(d_model, d_model)
        self.w_v = nn.Linear(d_model, d_model)
        nn.init.zeros_(self.w_v.weight)
        nn.init.zeros_(self.w_v.bias)

    def forward(
        self,
        video_tokens: torch.Tensor,  # [b, L, d]
        audio_tokens: torch.Tensor,  # [b, f, d], one per latent frame
        mask_flat: torch.Tensor,  # [b, L] binary
        frame_ids: torch.Tensor,  # [L] token frame indices (may include -1)
    ) -> torch.Tensor:
        if mask_flat.shape != video_tokens.shape[:2]:
            raise AdapterError(
                f"mask shape {tuple(mask_flat.shape)} != tokens {tuple(video_tokens.shape[:2])}"
            )
        b, length, _ = video_tokens.shape
        f = audio_tokens.shape[1]
        if int(frame_ids.max()) >= f:
            raise AdapterError(
                f"token frame {int(frame_ids.max())} has no audio token (f={f})"
            )

        def heads(x):
            return x.reshape(b, -1, self.n_heads, self.d_head).transpose(1, 2)

        q = heads(self.w_q(video_tokens))  # [b, h, L, dh]
        k = heads(self.w_k(audio_tokens))  # [b, h, f, dh]
        v = heads(self.w_v(audio_tokens))
        gather = frame_ids.clamp(min=0)  # frame -1 tokens are masked out anyway
        k_tok = k[:, :, gather]  # [b, h, L, dh]
        v_tok = v[:, :, gather]
        # One key per query: softmax over the singleton key set.
        scores = (q * k_tok).sum(dim=-1, keepdim=True) / math.sqrt(self.d_head)
        weights = scores.softmax(dim=-1)
        update = (weights * v_tok).transpose(1, 2).reshape(b, length, self.d_model)
        return video_tokens + mask_flat[..., None].to(update.dtype) * update
