"""Flow-matching objective over the linear noise path.

Z_t = (1-t) Z_0 + t * noise, target velocity v* = noise - Z_0, plain MSE.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F


class FlowMatchError(RuntimeError):
    pass


def interpolate_path(z0: torch.Tensor, noise: torch.Tensor, t: torch.Tensor) -> torch.Tensor:
    t = t.reshape(-1, *([1] * (z0.ndim - 1)))
    return (1.0 - t) * z0 + t * noise


def target_velocity(z0: torch.Tensor, noise: torch.Tensor) -> torch.Tensor:
    return noise - z0


def sample_timesteps(batch: int, generator: torch.Generator | None = None) -> torch.Tensor:
    """Uniform draws on the open interval (0, 1)."""
    t = torch.rand(batch, generator=generator)
    return t.clamp(1e-6, 1.0 - 1e-6)


def flow_match_loss(model, z0: torch.Tensor, conditions, t, noise: torch.Tensor) -> torch.Tensor:
    t = torch.as_tensor(t, dtype=z0.dtype)
    if t.ndim == 0:
        t = t[None].expand(z0.shape[0])
    if ((t <= 0) | (t >= 1)).any():
        raise FlowMatchError(f"t must lie in (0,1), got {t}")
    if noise.shape != z0.shape:
        raise FlowMatchError(f"noise shape {tuple(noise.shape)} != z0 {tuple(z0.shape)}")

    z_t = interpolate_path(z0, noise, t)
    pred = model(z_t, t, conditions)
    if not torch.isfinite(pred).all():
        bad = int((~torch.isfinite(pred)).sum())
        raise FlowMatchError(
            f"model produced {bad} non-finite values in its velocity prediction "
            f"(t={t.tolist()}, |z_t| max={z_t.abs().max().item():.3e})"
        )
    return F.mse_loss(pred, target_velocity(z0, noise))
