"""Interaction adapters: object-token attention blocks on even layers.

The self-attention variant reuses the host block's attention weights (video
stream for video tokens, text stream for the object token, which stands in
for text) and writes its output back only inside the object mask. The
object token rotates at frame -2 so it sits before both the video and the
temporally concatenated object frame. The cross-attention variant swaps the
joint self-attention for a fresh video->object cross-attention.

New projections (output projection and the semantic/time modulation head)
are zero-initialized by default, so attaching adapters leaves the model
function unchanged until training moves them.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..backbone.blocks import RMSNorm
from ..backbone.model import VideoBackbone
from ..backbone.rope import apply_rope


class AdapterError(ValueError):
    pass


class HoiAdapterLayer(nn.Module):
    def __init__(self, d_model: int, n_heads: int, variant: str = "self_attn"):
        super().__init__()
        if variant not in ("self_attn", "cross_attn"):
            raise AdapterError(f"unknown adapter variant {variant!r}")
        self.variant = variant
        self.d_model = d_model
        self.n_heads = n_heads
        self.d_head = d_model // n_heads

        self.norm_video = nn.LayerNorm(d_model, elementwise_affine=False, eps=1e-6)
        self.norm_obj = nn.LayerNorm(d_model, elementwise_affine=False, eps=1e-6)
        # (semantic embed + time embed) -> per-layer scale/shift on the output.
        self.mod = nn.Sequential(nn.Linear(d_model, d_model), nn.SiLU(), nn.Linear(d_model, 2 * d_model))
        nn.init.zeros_(self.mod[2].weight)
        nn.init.zeros_(self.mod[2].bias)

        if variant == "self_attn":
            self.qkv_video = nn.Linear(d_model, 3 * d_model)
            self.qkv_obj = nn.Linear(d_model, 3 * d_model)
            self.q_norm_video = RMSNorm(self.d_head)
            self.k_norm_video = RMSNorm(self.d_head)
            self.q_norm_obj = RMSNorm(self.d_head)
            self.k_norm_obj = RMSNorm(self.d_head)
            self.proj = nn.Linear(d_model, d_model)
        else:
            self.w_q = nn.Linear(d_model, d_model)
            self.w_k = nn.Linear(d_model, d_model)
            self.w_v = nn.Linear(d_model, d_model)
            self.proj = nn.Linear(d_model, d_model)

    def zero_output(self) -> None:
        with torch.no_grad():
            self.proj.weight.zero_()
            self.proj.bias.zero_()

    def _heads(self, x: torch.Tensor) -> torch.Tensor:
        b, length, _ = x.shape
        return x.reshape(b, length, self.n_heads, self.d_head).transpose(1, 2)

    def forward(
        self,
        video_tokens: torch.Tensor,  # [b, L, d]
        obj_tokens: torch.Tensor,  # [b, L_obj, d]
        mask_flat: torch.Tensor,  # [b, L] binary
        sem_t_embed: torch.Tensor,  # [b, d]
        video_phases: torch.Tensor,  # [L, d_head/2]
        obj_phases: torch.Tensor,  # [L_obj, d_head/2], RoPE(-2)
    ) -> torch.Tensor:
        if mask_flat.shape != video_tokens.shape[:2]:
            raise AdapterError(
                f"mask shape {tuple(mask_flat.shape)} != tokens {tuple(video_tokens.shape[:2])}"
            )
        b, n_video, _ = video_tokens.shape
        if self.variant == "self_attn":
            vq, vk, vv = self.qkv_video(self.norm_video(video_tokens)).chunk(3, dim=-1)
            oq, ok, ov = self.qkv_obj(self.norm_obj(obj_tokens)).chunk(3, dim=-1)
            vq = apply_rope(self.q_norm_video(self._heads(vq)), video_phases)
            vk = apply_rope(self.k_norm_video(self._heads(vk)), video_phases)
            oq = apply_rope(self.q_norm_obj(self._heads(oq)), obj_phases)
            ok = apply_rope(self.k_norm_obj(self._heads(ok)), obj_phases)
            q = torch.cat([vq, oq], dim=2)
            k = torch.cat([vk, ok], dim=2)
            v = torch.cat([self._heads(vv), self._heads(ov)], dim=2)
            attn = F.scaled_dot_product_attention(q, k, v)
            attn = attn.transpose(1, 2).reshape(b, -1, self.d_model)[:, :n_video]
        else:
            q = self._heads(self.w_q(self.norm_video(video_tokens)))
            k = self._heads(self.w_k(self.norm_obj(obj_tokens)))
            v = self._heads(self.w_v(self.norm_obj(obj_tokens)))
            scores = q @ k.transpose(-1, -2) / math.sqrt(self.d_head)
            attn = (scores.softmax(dim=-1) @ v).transpose(1, 2).reshape(b, n_video, self.d_model)

        out = self.proj(attn)
        scale, shift = self.mod(sem_t_embed).chunk(2, dim=-1)
        out = out * (1 + scale[:, None, :]) + shift[:, None, :]
        return video_tokens + mask_flat[..., None].to(out.dtype) * out


# adapter parameter name -> host block parameter name (self-attention variant)
_SELF_ATTN_SOURCES = {
    "qkv_video.weight": "img_attn.qkv.weight",
    "qkv_video.bias": "img_attn.qkv.bias",
    "q_norm_video.weight": "img_attn.q_norm.weight",
    "k_norm_video.weight": "img_attn.k_norm.weight",
    "qkv_obj.weight": "txt_attn.qkv.weight",
    "qkv_obj.bias": "txt_attn.qkv.bias",
    "q_norm_obj.weight": "txt_attn.q_norm.weight",
    "k_norm_obj.weight": "txt_attn.k_norm.weight",
    "proj.weight": "img_attn.proj.weight",
    "proj.bias": "img_attn.proj.bias",
}


class HoiAdapterStack(nn.Module):
    """Adapters keyed by host layer index, with weight-provenance metadata."""

    def __init__(self):
        super().__init__()
        self.adapters = nn.ModuleDict()
        self.sources: dict[str, str] = {}

    @property
    def layer_indices(self) -> tuple[int, ...]:
        return tuple(sorted(int(k) for k in self.adapters.keys()))

    def layer(self, idx: int) -> HoiAdapterLayer:
        return self.adapters[str(idx)]

    def remove_all(self) -> None:
        self.adapters = nn.ModuleDict()
        self.sources = {}


def attach_adapters(
    backbone: VideoBackbone,
    layer_indices: tuple[int, ...] | None = None,
    variant: str = "self_attn",
    zero_init_output: bool = True,
) -> HoiAdapterStack:
    """Create adapters for the given host layers, weights cloned from each
    host block. With zero_init_output the output projection starts at zero
    (initialization transparency); otherwise it clones the host projection."""
    cfg = backbone.config
    if layer_indices is None:
        layer_indices = cfg.resolved_adapter_layers()
    layer_indices = tuple(layer_indices)
    if len(set(layer_indices)) != len(layer_indices):
        raise AdapterError(f"duplicate adapter attachment: {layer_indices}")
    if any(i < 0 or i >= cfg.n_layers for i in layer_indices):
        raise AdapterError(f"adapter layer index out of range: {layer_indices}")

    stack = HoiAdapterStack()
    host_params = dict(backbone.named_parameters())
    for idx in layer_indices:
        adapter = HoiAdapterLayer(cfg.d_model, cfg.n_heads, variant=variant)
        if variant == "self_attn":
            with torch.no_grad():
                for adapter_name, host_suffix in _SELF_ATTN_SOURCES.items():
                    host_name = f"blocks.{idx}.{host_suffix}"
                    dst = adapter.get_parameter(adapter_name)
                    dst.copy_(host_params[host_name])
                    stack.sources[f"adapters.{idx}.{adapter_name}"] = host_name
        if zero_init_output:
            adapter.zero_output()
        stack.adapters[str(idx)] = adapter
    return stack
