"""3D rotary position embedding over (frame, row, col) token indices.

Head channels split 2:1:1 across the three axes. Phases are linear in each
index coordinate, so negative frame indices (-1 for the temporally
concatenated object token, -2 inside the interaction adapter) rotate as an
imaginary frame sitting before frame 0, and attention logits depend only on
index differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch


@dataclass(frozen=True)
class RoPEIndex:
    frame: int
    row: int
    col: int


def axis_split(d_head: int) -> tuple[int, int, int]:
    """Channel-pair counts per axis (frame, row, col); 2:1:1 of d_head."""
    pairs = d_head // 2
    return pairs // 2, pairs // 4, pairs // 4


def _axis_freqs(n_pairs: int, theta: float) -> torch.Tensor:
    i = torch.arange(n_pairs, dtype=torch.float64)
    return theta ** (-i / n_pairs)


def rope_phases(
    frame_ids: torch.Tensor,
    rows: torch.Tensor,
    cols: torch.Tensor,
    d_head: int,
    theta: float = 10000.0,
) -> torch.Tensor:
    """Rotation angles per channel pair, [L, d_head/2] float64."""
    if d_head % 8:
        raise ValueError("d_head must be divisible by 8")
    nf, nr, nc = axis_split(d_head)
    parts = []
    for pos, n_pairs in ((frame_ids, nf), (rows, nr), (cols, nc)):
        pos = torch.as_tensor(pos, dtype=torch.float64)
        parts.append(pos[:, None] * _axis_freqs(n_pairs, theta)[None, :])
    return torch.cat(parts, dim=-1)


def phases_for_index(idx: RoPEIndex, d_head: int, theta: float = 10000.0) -> torch.Tensor:
    return rope_phases(
        torch.tensor([idx.frame]), torch.tensor([idx.row]), torch.tensor([idx.col]),
        d_head, theta,
    )[0]


def apply_rope(x: torch.Tensor, phases: torch.Tensor) -> torch.Tensor:
    """Rotate consecutive channel pairs of x [..., L, d_head] by phases [L, d_head/2]."""
    cos = phases.cos().to(x.dtype)
    sin = phases.sin().to(x.dtype)
    pairs = x.reshape(*x.shape[:-1], -1, 2)
    x0, x1 = pairs[..., 0], pairs[..., 1]
    rotated = torch.stack((x0 * cos - x1 * sin, x0 * sin + x1 * cos), dim=-1)
    return rotated.reshape(x.shape)


def invert_rope(x: torch.Tensor, phases: torch.Tensor) -> torch.Tensor:
    return apply_rope(x, -phases)
