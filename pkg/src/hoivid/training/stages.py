"""Three-stage training schedule over the flow-matching objective.

Stage one learns pose control on human-only conditioning; stage two enables
object and audio conditions (the trajectory encoder starts as a copy of the
pose encoder); stage three moves to the tall resolution. The toy profile
shrinks resolutions and step counts to desk scale while keeping the stage
structure; the full profile records the reference regime.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..backbone.store import ParameterStore
from ..codec.vae import SPATIAL_FACTOR, VideoAutoencoder
from ..model import ConditionedInputs, ConditionEncoder, ConditionedVideoModel, collate_inputs
from .augment import augment_object
from .flow import flow_match_loss, sample_timesteps
from .synthetic import TrainSample


class MissingCheckpointError(RuntimeError):
    pass


@dataclass(frozen=True)
class StageSpec:
    name: str
    order: int
    resolution: tuple[int, int]
    steps: int
    batch_size: int = 2
    lr: float = 1e-4
    enable_object: bool = True
    enable_audio: bool = True
    init_traj_from_pose: bool = False

    def __post_init__(self):
        if self.steps <= 0:
            raise ValueError("steps must be > 0")
        if self.resolution[0] % SPATIAL_FACTOR or self.resolution[1] % SPATIAL_FACTOR:
            raise ValueError(f"resolution {self.resolution} not divisible by codec factor")


@dataclass(frozen=True)
class StageSchedule:
    stages: tuple[StageSpec, ...]

    @classmethod
    def toy(cls) -> "StageSchedule":
        # Tall stage keeps the reference 512:896 aspect shift at 64:112.
        return cls(
            (
                StageSpec("stage1", 1, (64, 64), 500, enable_object=False, enable_audio=False),
                StageSpec("stage2", 2, (64, 64), 200, init_traj_from_pose=True),
                StageSpec("stage3", 3, (64, 112), 200),
            )
        )

    @classmethod
    def full(cls) -> "StageSchedule":
        return cls(
            (
                StageSpec("stage1", 1, (512, 512), 16000, enable_object=False, enable_audio=False, lr=1e-5),
                StageSpec("stage2", 2, (512, 512), 2000, init_traj_from_pose=True, lr=1e-5),
                StageSpec("stage3", 3, (512, 896), 5000, lr=1e-5),
            )
        )


@dataclass
class StageResult:
    stage: str
    losses: list[float]
    state_dict: dict = field(repr=False, default_factory=dict)


def prepare_inputs(
    encoder: ConditionEncoder,
    samples: list[TrainSample],
    stage: StageSpec,
) -> list[ConditionedInputs]:
    inputs = []
    for sample in samples:
        if sample.video.shape[1:3] != stage.resolution:
            raise ValueError(
                f"sample resolution {sample.video.shape[1:3]} != stage {stage.resolution}"
            )
        inputs.append(
            encoder.encode_sample(
                sample.conditions,
                sample.human_image,
                sample.object_image if stage.enable_object else None,
                stage.resolution,
                enable_object=stage.enable_object,
                enable_audio=stage.enable_audio,
            )
        )
    return inputs


def run_stage(
    stage: StageSpec,
    samples: list[TrainSample],
    model: ConditionedVideoModel,
    codec: VideoAutoencoder,
    seed: int = 0,
    prev_checkpoint: dict | None = None,
    augment: bool = True,
    loss_log: list | None = None,
) -> StageResult:
    """Train one stage; returns the loss curve and the final weights."""
    if stage.order > 1 and prev_checkpoint is None:
        raise MissingCheckpointError(
            f"{stage.name} requires the previous stage's checkpoint"
        )
    if prev_checkpoint is not None:
        model.load_state_dict(prev_checkpoint)
    if stage.init_traj_from_pose:
        ParameterStore(model).copy_subtree_("pose_encoder", "traj_encoder")

    torch.manual_seed(seed)
    generator = torch.Generator().manual_seed(seed)
    aug_rng = np.random.default_rng(seed)
    codec.eval()
    encoder = ConditionEncoder(codec, model.config)
    inputs = prepare_inputs(encoder, samples, stage)

    with torch.no_grad():
        z0 = torch.cat(
            [codec.encode(torch.from_numpy(s.video)[None]) for s in samples], dim=0
        )

    optimizer = torch.optim.Adam(model.parameters(), lr=stage.lr)
    model.train()
    losses: list[float] = []
    n = len(samples)
    for step in range(stage.steps):
        idx = torch.randint(0, n, (stage.batch_size,), generator=generator).tolist()
        batch_inputs = [inputs[i] for i in idx]
        if augment and stage.enable_object:
            batch_inputs = [
                _with_augmented_object(encoder, samples[i], inp, stage, aug_rng)
                for i, inp in zip(idx, batch_inputs)
            ]
        batch = collate_inputs(batch_inputs)
        t = sample_timesteps(stage.batch_size, generator)
        noise = torch.randn(z0[idx].shape, generator=generator)
        loss = flow_match_loss(model, z0[idx], batch, t, noise)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        value = float(loss.detach())
        losses.append(value)
        if loss_log is not None:
            loss_log.append((step, value, stage.name))
    model.eval()
    state = {k: v.detach().clone() for k, v in model.state_dict().items()}
    return StageResult(stage=stage.name, losses=losses, state_dict=state)


def _with_augmented_object(encoder, sample, inputs, stage, rng) -> ConditionedInputs:
    from dataclasses import replace

    augmented = augment_object(sample.object_image, rng)
    fresh = encoder.encode_sample(
        sample.conditions,
        None,
        augmented,
        stage.resolution,
        enable_pose=False,
        enable_audio=False,
        enable_text=False,
    )
    return replace(
        inputs,
        z_obj=fresh.z_obj,
        z_obj_d=fresh.z_obj_d,
        object_mask=fresh.object_mask,
        object_images=fresh.object_images,
    )


def write_loss_log(rows: list[tuple[int, float, str]], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "loss", "stage"])
        writer.writerows(rows)


def run_schedule(
    schedule: StageSchedule,
    model: ConditionedVideoModel,
    codec: VideoAutoencoder,
    make_samples,
    seed: int = 0,
    augment: bool = True,
    log_path: str | Path | None = None,
) -> list[StageResult]:
    """Run all stages in order. `make_samples(stage)` supplies the dataset at
    each stage's resolution."""
    results: list[StageResult] = []
    rows: list = []
    prev: dict | None = None
    for stage in schedule.stages:
        result = run_stage(
            stage,
            make_samples(stage),
            model,
            codec,
            seed=seed,
            prev_checkpoint=prev,
            augment=augment,
            loss_log=rows,
        )
        results.append(result)
        prev = result.state_dict
    if log_path is not None:
        write_loss_log(rows, log_path)
    return results
