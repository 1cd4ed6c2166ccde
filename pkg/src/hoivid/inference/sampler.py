"""Euler integration of the learned velocity field from noise to video latent.

The flow runs from t=1 (pure noise) to t=0 over T uniform steps. Sampling is
deterministic given the seed; optional guidance contrasts conditioned and
unconditioned velocities (off by default, scale 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import torch


class SamplerError(RuntimeError):
    pass


@dataclass(frozen=True)
class SamplerConfig:
    steps: int = 50
    seed: int = 0
    guidance_scale: float = 1.0

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")


def initial_noise(shape, seed: int, dtype=torch.float32) -> torch.Tensor:
    generator = torch.Generator().manual_seed(seed)
    return torch.randn(shape, generator=generator, dtype=dtype)


def euler_step(z: torch.Tensor, v: torch.Tensor, steps: int, step_index: int) -> torch.Tensor:
    if not torch.isfinite(v).all():
        raise SamplerError(f"non-finite velocity at step {step_index}")
    z = z - v / steps
    if not torch.isfinite(z).all():
        raise SamplerError(f"non-finite latent after step {step_index}")
    return z


def timestep_for(step_index: int, steps: int) -> float:
    return 1.0 - step_index / steps


@torch.no_grad()
def sample(
    model,
    conditions,
    shape: tuple[int, ...],
    cfg: SamplerConfig,
    uncond_conditions=None,
) -> torch.Tensor:
    """Integrate dZ/dt = v(Z, t | conditions) from seeded noise down to Z_0.

    `model` is any callable (z, t, conditions) -> velocity of z's shape.
    """
    z = initial_noise(shape, cfg.seed)
    for k in range(cfg.steps):
        t = timestep_for(k, cfg.steps)
        v = model(z, t, conditions)
        if cfg.guidance_scale != 1.0:
            if uncond_conditions is None:
                raise SamplerError("guidance requires unconditional inputs")
            v_uncond = model(z, t, uncond_conditions)
            v = v_uncond + cfg.guidance_scale * (v - v_uncond)
        z = euler_step(z, v, cfg.steps, k)
    return z
