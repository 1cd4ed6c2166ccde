"""Checkpoints: named-parameter archives keyed by dotted path strings."""

from __future__ import annotations

from pathlib import Path

import torch


def save_checkpoint(named_tensors: dict[str, torch.Tensor], path: str | Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    torch.save({k: v.detach().cpu() for k, v in named_tensors.items()}, path)


def load_checkpoint(path: str | Path) -> dict[str, torch.Tensor]:
    return torch.load(path, map_location="cpu", weights_only=True)
