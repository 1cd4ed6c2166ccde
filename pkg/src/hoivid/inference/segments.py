"""Long-video generation over overlapping latent-frame windows.

Segments are denoised independently and their overlapping frames replaced by
a convex blend after every Euler step (or once at the end with final_merge).
Blend weights ramp triangularly toward each window's interior, so the
segment whose interior a frame sits in dominates, and per-frame weights sum
to exactly 1 by assigning the last covering segment the complement.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as dc_replace

import numpy as np
import torch

from ..adapters.masks import MaskVolume
from ..codec.vae import TEMPORAL_FACTOR
from ..model import ConditionedInputs
from .sampler import SamplerConfig, euler_step, initial_noise, timestep_for


class SegmentPlanError(ValueError):
    pass


@dataclass(frozen=True)
class SegmentPlan:
    windows: tuple[tuple[int, int], ...]  # latent-frame [start, end)
    overlap: int
    weights: np.ndarray  # [n_windows, f_total], zero outside each window

    @property
    def f_total(self) -> int:
        return int(self.weights.shape[1])

    def frame_weight_sums(self) -> np.ndarray:
        """Per-frame weight totals accumulated in window order (the same
        order blend_segments uses); exactly 1.0 for every frame."""
        sums = np.zeros(self.f_total)
        for i in range(len(self.windows)):
            sums = sums + self.weights[i]
        return sums


def plan_segments(f_total: int, segment_len: int, overlap: int) -> SegmentPlan:
    if not segment_len > overlap >= 1:
        raise SegmentPlanError(
            f"need segment_len > overlap >= 1, got {segment_len}, {overlap}"
        )
    if f_total < 1:
        raise SegmentPlanError("f_total must be >= 1")
    if f_total <= segment_len:
        windows = [(0, f_total)]
    else:
        stride = segment_len - overlap
        windows = []
        start = 0
        while start + segment_len <= f_total:
            windows.append((start, start + segment_len))
            start += stride
        if windows[-1][1] < f_total:
            windows.append((f_total - segment_len, f_total))  # right-aligned tail

    raw = np.zeros((len(windows), f_total))
    for i, (a, b) in enumerate(windows):
        for g in range(a, b):
            raw[i, g] = min(g - a + 1, b - g)  # closer to the interior -> higher
    weights = np.zeros_like(raw)
    for g in range(f_total):
        covering = np.nonzero(raw[:, g])[0]
        total = raw[covering, g].sum()
        # The last covering segment takes the complement of a running sum
        # accumulated in window order; re-summing in that same order then
        # yields exactly 1.0 (the final add rounds 1 + eps back to 1).
        running = 0.0
        for j in covering[:-1]:
            weights[j, g] = raw[j, g] / total
            running = running + weights[j, g]
        weights[covering[-1], g] = 1.0 - running
    return SegmentPlan(windows=tuple(windows), overlap=overlap, weights=weights)


def slice_inputs(
    inputs: ConditionedInputs | None, start: int, end: int
) -> ConditionedInputs | None:
    """Restrict prepared conditions to a latent-frame window [start, end)."""
    if inputs is None:
        return None

    def frame_slice(t):
        return None if t is None else t[:, start:end]

    audio = inputs.audio_features
    if audio is not None:
        # Rebuild a 4k+1 pixel-frame feature array whose window means match
        # the global windows start..end-1 (frame 0 carries the whole first
        # window's mean).
        chunks = [_window_mean(audio, start)]
        for j in range(start + 1, end):
            lo = TEMPORAL_FACTOR * (j - 1) + 1
            chunks.append(audio[:, lo : lo + TEMPORAL_FACTOR])
        audio = torch.cat(chunks, dim=1)

    return dc_replace(
        inputs,
        z_obj_d=frame_slice(inputs.z_obj_d),
        pose_latent=frame_slice(inputs.pose_latent),
        traj_latent=frame_slice(inputs.traj_latent),
        motion_latent=frame_slice(inputs.motion_latent),
        object_mask=_slice_mask(inputs.object_mask, start, end),
        face_mask=_slice_mask(inputs.face_mask, start, end),
        audio_features=audio,
    )


def _window_mean(audio: torch.Tensor, j: int) -> torch.Tensor:
    if j == 0:
        return audio[:, 0:1]
    lo = TEMPORAL_FACTOR * (j - 1) + 1
    return audio[:, lo : lo + TEMPORAL_FACTOR].mean(dim=1, keepdim=True)


def _slice_mask(mask: MaskVolume | None, start: int, end: int) -> MaskVolume | None:
    if mask is None:
        return None
    return MaskVolume(mask.values[:, start:end])


def blend_segments(
    segment_latents: list[torch.Tensor], plan: SegmentPlan
) -> torch.Tensor:
    """Weighted merge of per-segment latents into the global latent."""
    b, _, h, w, c = segment_latents[0].shape
    dtype = segment_latents[0].dtype
    out = torch.zeros(b, plan.f_total, h, w, c, dtype=dtype)
    for i, (a, bnd) in enumerate(plan.windows):
        weight = torch.from_numpy(plan.weights[i, a:bnd]).to(dtype)
        out[:, a:bnd] += weight.view(1, -1, 1, 1, 1) * segment_latents[i]
    return out


@torch.no_grad()
def long_video_sample(
    model,
    inputs: ConditionedInputs | None,
    plan: SegmentPlan,
    shape: tuple[int, ...],
    cfg: SamplerConfig,
    final_merge: bool = False,
) -> torch.Tensor:
    """Denoise overlapping segments jointly and return the fused latent.

    `shape` is the global latent shape [b, f_total, h, w, c]; all segments
    start from the same global noise so overlapping frames agree at t=1.
    """
    if shape[1] != plan.f_total:
        raise SegmentPlanError(
            f"plan covers {plan.f_total} latent frames, shape has {shape[1]}"
        )
    if inputs is not None and inputs.z_obj_d is not None:
        if inputs.z_obj_d.shape[1] != plan.f_total:
            raise SegmentPlanError("conditions do not cover the planned frames")

    noise = initial_noise(shape, cfg.seed)
    segments = [noise[:, a:b].clone() for a, b in plan.windows]
    seg_inputs = [slice_inputs(inputs, a, b) for a, b in plan.windows]

    for k in range(cfg.steps):
        t = timestep_for(k, cfg.steps)
        for i in range(len(segments)):
            v = model(segments[i], t, seg_inputs[i])
            segments[i] = euler_step(segments[i], v, cfg.steps, k)
        if not final_merge:
            fused = blend_segments(segments, plan)
            for i, (a, b) in enumerate(plan.windows):
                segments[i] = fused[:, a:b].clone()
    return blend_segments(segments, plan)
