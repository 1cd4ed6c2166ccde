"""Double-stream transformer blocks with timestep modulation.

Video and text streams keep separate projections and modulation but attend
jointly over the concatenated sequence. Rotary position goes on the video
stream only; text tokens are position-free.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn
import torch.nn.functional as F

from .rope import apply_rope

# t lives in [0, 1]; stretch before the sinusoid so nearby timesteps separate.
TIME_SCALE = 1000.0


def sinusoidal_embedding(t: torch.Tensor, dim: int, max_period: float = 10000.0) -> torch.Tensor:
    half = dim // 2
    freqs = torch.exp(
        -math.log(max_period)
        * torch.arange(half, dtype=t.dtype, device=t.device)
        / half
    )
    angles = t[:, None] * TIME_SCALE * freqs[None, :]
    return torch.cat([torch.sin(angles), torch.cos(angles)], dim=-1)


class TimestepEmbedding(nn.Module):
    """Sinusoid on t in [0,1] followed by a two-layer projection."""

    def __init__(self, d_model: int):
        super().__init__()
        self.d_model = d_model
        self.fc1 = nn.Linear(d_model, d_model)
        self.fc2 = nn.Linear(d_model, d_model)

    def forward(self, t: torch.Tensor) -> torch.Tensor:
        t = torch.as_tensor(t)
        if t.ndim == 0:
            t = t[None]
        if ((t < 0) | (t > 1)).any():
            raise ValueError(f"timestep must lie in [0,1], got {t}")
        dtype = self.fc1.weight.dtype
        emb = sinusoidal_embedding(t.to(dtype), self.d_model)
        return self.fc2(F.silu(self.fc1(emb)))


class RMSNorm(nn.Module):
    def __init__(self, dim: int, eps: float = 1e-6):
        super().__init__()
        self.eps = eps
        self.weight = nn.Parameter(torch.ones(dim))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        rms = x.pow(2).mean(dim=-1, keepdim=True).add(self.eps).rsqrt()
        return x * rms * self.weight


def modulate(x: torch.Tensor, shift: torch.Tensor, scale: torch.Tensor) -> torch.Tensor:
    return x * (1 + scale[:, None, :]) + shift[:, None, :]


class StreamAttention(nn.Module):
    """QKV + output projection for one stream; qk-normed per head."""

    def __init__(self, d_model: int, n_heads: int):
        super().__init__()
        self.n_heads = n_heads
        self.d_head = d_model // n_heads
        self.qkv = nn.Linear(d_model, 3 * d_model)
        self.q_norm = RMSNorm(self.d_head)
        self.k_norm = RMSNorm(self.d_head)
        self.proj = nn.Linear(d_model, d_model)

    def qkv_heads(self, x: torch.Tensor):
        b, length, _ = x.shape
        q, k, v = self.qkv(x).chunk(3, dim=-1)

        def heads(y):
            return y.reshape(b, length, self.n_heads, self.d_head).transpose(1, 2)

        return self.q_norm(heads(q)), self.k_norm(heads(k)), heads(v)


class DoubleStreamBlock(nn.Module):
    def __init__(self, d_model: int, n_heads: int, mlp_ratio: float = 4.0):
        super().__init__()
        self.d_model = d_model
        self.n_heads = n_heads
        hidden = int(d_model * mlp_ratio)

        self.img_mod = nn.Linear(d_model, 6 * d_model)
        self.txt_mod = nn.Linear(d_model, 6 * d_model)
        self.img_norm1 = nn.LayerNorm(d_model, elementwise_affine=False, eps=1e-6)
        self.txt_norm1 = nn.LayerNorm(d_model, elementwise_affine=False, eps=1e-6)
        self.img_attn = StreamAttention(d_model, n_heads)
        self.txt_attn = StreamAttention(d_model, n_heads)
        self.img_norm2 = nn.LayerNorm(d_model, elementwise_affine=False, eps=1e-6)
        self.txt_norm2 = nn.LayerNorm(d_model, elementwise_affine=False, eps=1e-6)
        self.img_mlp = nn.Sequential(
            nn.Linear(d_model, hidden), nn.GELU(approximate="tanh"), nn.Linear(hidden, d_model)
        )
        self.txt_mlp = nn.Sequential(
            nn.Linear(d_model, hidden), nn.GELU(approximate="tanh"), nn.Linear(hidden, d_model)
        )

    def forward(
        self,
        img: torch.Tensor,
        txt: torch.Tensor,
        t_vec: torch.Tensor,
        img_phases: torch.Tensor,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        (i_shift1, i_scale1, i_gate1, i_shift2, i_scale2, i_gate2) = self.img_mod(
            F.silu(t_vec)
        ).chunk(6, dim=-1)
        (t_shift1, t_scale1, t_gate1, t_shift2, t_scale2, t_gate2) = self.txt_mod(
            F.silu(t_vec)
        ).chunk(6, dim=-1)

        img_q, img_k, img_v = self.img_attn.qkv_heads(
            modulate(self.img_norm1(img), i_shift1, i_scale1)
        )
        img_q = apply_rope(img_q, img_phases)
        img_k = apply_rope(img_k, img_phases)

        txt_q, txt_k, txt_v = self.txt_attn.qkv_heads(
            modulate(self.txt_norm1(txt), t_shift1, t_scale1)
        )

        q = torch.cat([img_q, txt_q], dim=2)
        k = torch.cat([img_k, txt_k], dim=2)
        v = torch.cat([img_v, txt_v], dim=2)
        attn = F.scaled_dot_product_attention(q, k, v)
        attn = attn.transpose(1, 2).reshape(img.shape[0], -1, self.d_model)

        n_img = img.shape[1]
        img = img + i_gate1[:, None, :] * self.img_attn.proj(attn[:, :n_img])
        txt = txt + t_gate1[:, None, :] * self.txt_attn.proj(attn[:, n_img:])

        img = img + i_gate2[:, None, :] * self.img_mlp(
            modulate(self.img_norm2(img), i_shift2, i_scale2)
        )
        txt = txt + t_gate2[:, None, :] * self.txt_mlp(
            modulate(self.txt_norm2(txt), t_shift2, t_scale2)
        )
        return img, txt


class FinalLayer(nn.Module):
    """Modulated norm + linear head back to patch channels; zero-init so the
    untrained model predicts zero velocity."""

    def __init__(self, d_model: int, out_dim: int):
        super().__init__()
        self.norm = nn.LayerNorm(d_model, elementwise_affine=False, eps=1e-6)
        self.mod = nn.Linear(d_model, 2 * d_model)
        self.proj = nn.Linear(d_model, out_dim)
        nn.init.zeros_(self.proj.weight)
        nn.init.zeros_(self.proj.bias)

    def forward(self, x: torch.Tensor, t_vec: torch.Tensor) -> torch.Tensor:
        shift, scale = self.mod(F.silu(t_vec)).chunk(2, dim=-1)
        return self.proj(modulate(self.norm(x), shift, scale))
