"""The overfit fixture: codec + model trained to memorize the 8-clip set.

This is the repo's end-to-end quantitative reference: the codec is overfit
first and frozen, the conditioned model then trains for a fixed number of
steps, and sampling from a pinned seed must reproduce a memorized clip.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..backbone.config import BackboneConfig
from ..codec.vae import CodecConfig, VideoAutoencoder, fit_autoencoder
from ..inference.sampler import SamplerConfig, sample
from ..model import ConditionEncoder, ConditionedVideoModel, save_bundle
from .stages import StageSpec, run_stage
from .synthetic import TrainSample, make_synthetic_set

FIXTURE_RESOLUTION = (64, 64)
FIXTURE_CLIP_COUNT = 8
FIXTURE_FRAMES = 5
FIXTURE_STEPS = 500
FIXTURE_CODEC_STEPS = 800
FIXTURE_LR = 3e-4
FIXTURE_SAMPLE_SEED = 1234


@dataclass
class OverfitFixture:
    model: ConditionedVideoModel
    codec: VideoAutoencoder
    samples: list[TrainSample]
    losses: list[float]
    metrics: dict = field(default_factory=dict)


def sample_clip_mae(
    fixture_model: ConditionedVideoModel,
    codec: VideoAutoencoder,
    sample_item: TrainSample,
    resolution=FIXTURE_RESOLUTION,
    steps: int = 50,
    seed: int = FIXTURE_SAMPLE_SEED,
) -> tuple[float, torch.Tensor]:
    """Sample with the clip's conditions; per-pixel MAE against the clip."""
    encoder = ConditionEncoder(codec, fixture_model.config)
    inputs = encoder.encode_sample(
        sample_item.conditions, sample_item.human_image, sample_item.object_image, resolution
    )
    target = torch.from_numpy(sample_item.video)[None]
    with torch.no_grad():
        z0 = codec.encode(target)
    z_hat = sample(fixture_model, inputs, tuple(z0.shape), SamplerConfig(steps=steps, seed=seed))
    with torch.no_grad():
        video = codec.decode(z_hat)
    return float((video - target).abs().mean()), video


def train_overfit_fixture(
    out_dir: str | Path | None = None,
    seed: int = 0,
    steps: int = FIXTURE_STEPS,
    codec_steps: int = FIXTURE_CODEC_STEPS,
    lr: float = FIXTURE_LR,
) -> OverfitFixture:
    samples = make_synthetic_set(
        count=FIXTURE_CLIP_COUNT,
        n_frames=FIXTURE_FRAMES,
        height=FIXTURE_RESOLUTION[0],
        width=FIXTURE_RESOLUTION[1],
        seed=seed,
        with_audio=True,
    )
    clips = torch.from_numpy(np.stack([s.video for s in samples]))

    torch.manual_seed(seed)
    codec = VideoAutoencoder(CodecConfig(latent_channels=8, base_channels=24))
    fit_autoencoder(codec, clips, steps=codec_steps, seed=seed)
    codec.eval()

    torch.manual_seed(seed)
    model = ConditionedVideoModel(BackboneConfig())
    stage = StageSpec(
        "overfit", 1, FIXTURE_RESOLUTION, steps=steps, batch_size=2, lr=lr
    )
    result = run_stage(stage, samples, model, codec, seed=seed, augment=False)

    initial = result.losses[0]
    final = float(np.mean(result.losses[-10:]))
    mae, _ = sample_clip_mae(model, codec, samples[0])
    fixture = OverfitFixture(
        model=model,
        codec=codec,
        samples=samples,
        losses=result.losses,
        metrics={
            "initial_loss": initial,
            "final_loss": final,
            "loss_ratio": final / initial,
            "sample_mae": mae,
        },
    )
    if out_dir is not None:
        save_bundle(out_dir, model, codec)
    return fixture
