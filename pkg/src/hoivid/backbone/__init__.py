from .config import AblationFlags, BackboneConfig
from .rope import RoPEIndex, apply_rope, axis_split, invert_rope, phases_for_index, rope_phases
from .blocks import (
    DoubleStreamBlock,
    FinalLayer,
    RMSNorm,
    TimestepEmbedding,
    modulate,
    sinusoidal_embedding,
)
from .model import VideoBackbone
from .store import ParameterStore

__all__ = [
    "AblationFlags",
    "BackboneConfig",
    "DoubleStreamBlock",
    "FinalLayer",
    "ParameterStore",
    "RMSNorm",
    "RoPEIndex",
    "TimestepEmbedding",
    "VideoBackbone",
    "apply_rope",
    "axis_split",
    "invert_rope",
    "modulate",
    "phases_for_index",
    "rope_phases",
    "sinusoidal_embedding",
]
