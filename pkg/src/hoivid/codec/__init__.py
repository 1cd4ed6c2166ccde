from .vae import (
    CodecConfig,
    CodecShapeError,
    SPATIAL_FACTOR,
    TEMPORAL_FACTOR,
    VideoAutoencoder,
    check_video_shape,
    fit_autoencoder,
    kl_divergence,
    latent_frames,
    psnr,
    video_frames,
)
from .patchify import (
    PatchEmbed,
    PatchShapeError,
    TokenGrid,
    build_token_indices,
    space_to_tokens,
    token_index,
    tokens_to_space,
)

__all__ = [
    "CodecConfig",
    "CodecShapeError",
    "PatchEmbed",
    "PatchShapeError",
    "SPATIAL_FACTOR",
    "TEMPORAL_FACTOR",
    "TokenGrid",
    "VideoAutoencoder",
    "build_token_indices",
    "check_video_shape",
    "fit_autoencoder",
    "kl_divergence",
    "latent_frames",
    "psnr",
    "space_to_tokens",
    "token_index",
    "tokens_to_space",
    "video_frames",
]
