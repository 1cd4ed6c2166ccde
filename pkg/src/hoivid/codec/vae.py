"""Toy 3D video autoencoder: 8x spatial and 4x temporal compression.

Causal in time: frame 0 is encoded independently (so single images share the
video code path) and every clip of n = 4k+1 frames maps to 1+(n-1)/4 latent
frames. Tensors cross the public API channel-last ([b, n, H, W, 3] videos,
[b, f, h, w, c] latents); layout permutes are internal.

`encode` always returns the posterior mean, so it is deterministic; sampling
happens only inside the training step. A `latent_scale` buffer (set after
codec training) normalizes latents to roughly unit variance for the
downstream diffusion objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

SPATIAL_FACTOR = 8
TEMPORAL_FACTOR = 4


class CodecShapeError(ValueError):
    pass


@dataclass(frozen=True)
class CodecConfig:
    latent_channels: int = 8
    base_channels: int = 32


def latent_frames(n_frames: int) -> int:
    if n_frames < 1 or (n_frames - 1) % TEMPORAL_FACTOR != 0:
        raise CodecShapeError(f"n_frames must be 4k+1, got {n_frames}")
    return 1 + (n_frames - 1) // TEMPORAL_FACTOR


def video_frames(f_latent: int) -> int:
    return TEMPORAL_FACTOR * (f_latent - 1) + 1


def check_video_shape(video: torch.Tensor) -> None:
    if video.ndim != 5 or video.shape[-1] != 3:
        raise CodecShapeError(f"video must be [b, n, H, W, 3], got {tuple(video.shape)}")
    _, n, height, width, _ = video.shape
    latent_frames(n)
    if height % SPATIAL_FACTOR or width % SPATIAL_FACTOR:
        raise CodecShapeError(
            f"spatial dims {height}x{width} not divisible by {SPATIAL_FACTOR}"
        )


class CausalConv3d(nn.Module):
    """Conv3d with replicate front-padding in time; frames never see the future."""

    def __init__(self, cin, cout, kt=3, ks=3, temporal_stride=1, spatial_stride=1):
        super().__init__()
        self.pad_t = kt - 1
        self.conv = nn.Conv3d(
            cin,
            cout,
            kernel_size=(kt, ks, ks),
            stride=(temporal_stride, spatial_stride, spatial_stride),
            padding=(0, ks // 2, ks // 2),
        )

    def forward(self, x):
        if self.pad_t:
            x = F.pad(x, (0, 0, 0, 0, self.pad_t, 0), mode="replicate")
        return self.conv(x)


class ResBlock3d(nn.Module):
    def __init__(self, channels, groups=8):
        super().__init__()
        self.norm1 = nn.GroupNorm(groups, channels)
        self.conv1 = CausalConv3d(channels, channels)
        self.norm2 = nn.GroupNorm(groups, channels)
        self.conv2 = CausalConv3d(channels, channels)

    def forward(self, x):
        h = self.conv1(F.silu(self.norm1(x)))
        h = self.conv2(F.silu(self.norm2(h)))
        return x + h


class TemporalUpsample(nn.Module):
    """T -> 2T-1: a conv emits two candidate frames per input frame, which are
    interleaved in time with the leading duplicate dropped."""

    def __init__(self, channels):
        super().__init__()
        self.conv = CausalConv3d(channels, 2 * channels)

    def forward(self, x):
        b, c, t, h, w = x.shape
        first, second = self.conv(x).chunk(2, dim=1)
        pairs = torch.stack((first, second), dim=3)  # [b, c, T, 2, h, w]
        return pairs.reshape(b, c, 2 * t, h, w)[:, :, 1:]


class VideoAutoencoder(nn.Module):
    def __init__(self, config: CodecConfig | None = None):
        super().__init__()
        self.config = config or CodecConfig()
        ch = self.config.base_channels
        c_lat = self.config.latent_channels

        self.encoder = nn.ModuleList(
            [
                CausalConv3d(3, ch),
                CausalConv3d(ch, ch, spatial_stride=2),
                ResBlock3d(ch),
                CausalConv3d(ch, ch * 2, temporal_stride=2, spatial_stride=2),
                ResBlock3d(ch * 2),
                CausalConv3d(ch * 2, ch * 2, temporal_stride=2, spatial_stride=2),
                ResBlock3d(ch * 2),
            ]
        )
        self.enc_norm = nn.GroupNorm(8, ch * 2)
        self.enc_head = CausalConv3d(ch * 2, 2 * c_lat, kt=1, ks=3)
        # Start the posterior tight: bias the logvar half of the head low so
        # early training is not dominated by reparameterization noise.
        with torch.no_grad():
            self.enc_head.conv.bias[c_lat:].fill_(-6.0)

        self.dec_stem = CausalConv3d(c_lat, ch * 2, kt=1, ks=3)
        self.decoder = nn.ModuleList(
            [
                ResBlock3d(ch * 2),
                TemporalUpsample(ch * 2),
                _SpatialUp(ch * 2, ch * 2),
                ResBlock3d(ch * 2),
                TemporalUpsample(ch * 2),
                _SpatialUp(ch * 2, ch),
                ResBlock3d(ch),
                _SpatialUp(ch, ch),
            ]
        )
        self.dec_norm = nn.GroupNorm(8, ch)
        self.dec_head = CausalConv3d(ch, 3)
        self.register_buffer("latent_scale", torch.ones(()))

    def encode_posterior(self, video: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """Unscaled posterior (mean, logvar), both [b, f, h, w, c]."""
        check_video_shape(video)
        x = video.permute(0, 4, 1, 2, 3)  # -> [b, 3, n, H, W]
        for layer in self.encoder:
            x = layer(x)
        x = self.enc_head(F.silu(self.enc_norm(x)))
        mean, logvar = x.chunk(2, dim=1)
        return mean.permute(0, 2, 3, 4, 1), logvar.permute(0, 2, 3, 4, 1)

    def encode(self, video: torch.Tensor) -> torch.Tensor:
        """Deterministic latent (posterior mean, scaled), [b, f, h, w, c]."""
        mean, _ = self.encode_posterior(video)
        z = mean * self.latent_scale
        if not torch.isfinite(z).all():
            raise FloatingPointError("encoder produced non-finite latent")
        return z

    def decode(self, z: torch.Tensor) -> torch.Tensor:
        """Latent [b, f, h, w, c] -> video [b, 4(f-1)+1, 8h, 8w, 3] in [-1, 1]."""
        if z.ndim != 5 or z.shape[-1] != self.config.latent_channels:
            raise CodecShapeError(f"latent must be [b,f,h,w,{self.config.latent_channels}]")
        x = (z / self.latent_scale).permute(0, 4, 1, 2, 3)
        x = self.dec_stem(x)
        for layer in self.decoder:
            x = layer(x)
        x = self.dec_head(F.silu(self.dec_norm(x)))
        video = x.permute(0, 2, 3, 4, 1).clamp(-1.0, 1.0)
        if not torch.isfinite(video).all():
            raise FloatingPointError("decoder produced non-finite video")
        return video

    def latent_shape(self, b, n_frames, height, width):
        return (
            b,
            latent_frames(n_frames),
            height // SPATIAL_FACTOR,
            width // SPATIAL_FACTOR,
            self.config.latent_channels,
        )


class _SpatialUp(nn.Module):
    """2x spatial pixel shuffle driven by a causal conv."""

    def __init__(self, cin, cout):
        super().__init__()
        self.cout = cout
        self.conv = CausalConv3d(cin, 4 * cout)

    def forward(self, x):
        x = self.conv(x)
        b, _, t, h, w = x.shape
        x = x.reshape(b, self.cout, 2, 2, t, h, w)
        x = x.permute(0, 1, 4, 5, 2, 6, 3)  # b, c, t, h, dh, w, dw
        return x.reshape(b, self.cout, t, 2 * h, 2 * w)


def kl_divergence(mean: torch.Tensor, logvar: torch.Tensor) -> torch.Tensor:
    return 0.5 * (mean.pow(2) + logvar.exp() - 1.0 - logvar).mean()


def fit_autoencoder(
    model: VideoAutoencoder,
    clips: torch.Tensor,
    steps: int = 400,
    lr: float = 2e-3,
    batch_size: int = 2,
    kl_weight: float = 1e-6,
    seed: int = 0,
) -> list[float]:
    """Overfit the codec on a stack of clips [N, n, H, W, 3]; returns the loss log.

    After training, `latent_scale` is set so encoded clips have unit std.
    """
    generator = torch.Generator().manual_seed(seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=lr)
    losses = []
    model.train()
    for _ in range(steps):
        idx = torch.randint(0, clips.shape[0], (batch_size,), generator=generator)
        batch = clips[idx]
        mean, logvar = model.encode_posterior(batch)
        noise = torch.randn(mean.shape, generator=generator, dtype=mean.dtype)
        z = mean + (0.5 * logvar).exp() * noise
        recon = model.decode(z * model.latent_scale)
        loss = F.mse_loss(recon, batch) + kl_weight * kl_divergence(mean, logvar)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        losses.append(float(loss.detach()))
    model.eval()
    with torch.no_grad():
        mean, _ = model.encode_posterior(clips)
        model.latent_scale.fill_(1.0 / mean.std().clamp(min=1e-6))
    return losses


def psnr(a: torch.Tensor, b: torch.Tensor, peak: float = 2.0) -> float:
    """PSNR in dB for tensors ranged [-1, 1]."""
    mse = F.mse_loss(a, b).item()
    if mse == 0:
        return float("inf")
    return 10.0 * torch.log10(torch.tensor(peak**2 / mse)).item()
