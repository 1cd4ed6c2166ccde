from .appearance import (
    FusionShapeError,
    broadcast_reference,
    channel_concat_appearance,
    split_channel_concat,
    token_temporal_concat,
)
from .paste import (
    PasteError,
    PasteSpec,
    first_pixel_frame,
    paste_object_along_trajectory,
    paste_spec_from_motion,
    paste_support_mask,
    resize_object_latent,
)
from .motion import MotionEncoder, motion_fuse
from .semantic import (
    HashTextEncoder,
    ImageSemanticEncoder,
    TinyImageSummarizer,
    semantic_token_fusion,
)

__all__ = [
    "FusionShapeError",
    "HashTextEncoder",
    "ImageSemanticEncoder",
    "MotionEncoder",
    "PasteError",
    "PasteSpec",
    "TinyImageSummarizer",
    "broadcast_reference",
    "channel_concat_appearance",
    "first_pixel_frame",
    "motion_fuse",
    "paste_object_along_trajectory",
    "paste_spec_from_motion",
    "paste_support_mask",
    "resize_object_latent",
    "semantic_token_fusion",
    "split_channel_concat",
    "token_temporal_concat",
]
