"""Backbone dimensions, adapter placement, and ablation switches."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path


@dataclass(frozen=True)
class AblationFlags:
    """Variant switches mirroring the supported ablations."""

    object_motion_encoding: str = "dot"  # dot | bbox | gaussian_dot
    use_token_concat: bool = True
    use_channel_paste: bool = True
    fix_copy: bool = False
    single_motion_encoder: bool = False
    adapter_variant: str = "self_attn"  # self_attn | cross_attn | none
    use_audio: bool = True

    def __post_init__(self):
        if self.object_motion_encoding not in ("dot", "bbox", "gaussian_dot"):
            raise ValueError(f"unknown motion encoding {self.object_motion_encoding!r}")
        if self.adapter_variant not in ("self_attn", "cross_attn", "none"):
            raise ValueError(f"unknown adapter variant {self.adapter_variant!r}")


@dataclass(frozen=True)
class BackboneConfig:
    d_model: int = 128
    n_heads: int = 4
    n_layers: int = 8
    patch_size: int = 2
    text_dim: int = 64
    max_frames: int = 32
    rope_theta: float = 10000.0
    latent_channels: int = 8
    in_channels: int = 8  # patch-embed input channels (3*latent for the fused model)
    audio_dim: int = 16
    adapter_layers: tuple[int, ...] | None = None  # None -> even layers, 0-based
    paste_start_frame: int = 0
    ablation: AblationFlags = field(default_factory=AblationFlags)

    def __post_init__(self):
        if self.d_model % self.n_heads:
            raise ValueError("d_model must be divisible by n_heads")
        if self.n_layers < 2 or self.n_layers % 2:
            raise ValueError("n_layers must be even and >= 2")
        if self.d_head % 8:
            raise ValueError("head dim must be divisible by 8 for the 2:1:1 rope split")
        if self.adapter_layers is not None:
            layers = tuple(self.adapter_layers)
            if len(set(layers)) != len(layers):
                raise ValueError("duplicate adapter layer indices")
            if any(i < 0 or i >= self.n_layers for i in layers):
                raise ValueError("adapter layer index out of range")
            object.__setattr__(self, "adapter_layers", layers)

    @property
    def d_head(self) -> int:
        return self.d_model // self.n_heads

    def resolved_adapter_layers(self) -> tuple[int, ...]:
        if self.adapter_layers is not None:
            return self.adapter_layers
        return tuple(range(0, self.n_layers, 2))

    def with_ablation(self, **kwargs) -> "BackboneConfig":
        return replace(self, ablation=replace(self.ablation, **kwargs))

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["adapter_layers"] = None if self.adapter_layers is None else list(self.adapter_layers)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "BackboneConfig":
        doc = dict(doc)
        ablation = AblationFlags(**doc.pop("ablation", {}))
        layers = doc.pop("adapter_layers", None)
        return cls(
            ablation=ablation,
            adapter_layers=None if layers is None else tuple(layers),
            **doc,
        )

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)

    @classmethod
    def load(cls, path: str | Path) -> "BackboneConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))
