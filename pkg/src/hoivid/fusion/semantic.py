"""Semantic side channel for the text branch.

A pluggable image summarizer stands in for a large vision-language encoder:
anything mapping an image batch to one or more text-width tokens fits the
interface. Fused text-branch input is [text; human summary; object summary].
"""

from __future__ import annotations

import hashlib
from typing import Protocol, runtime_checkable

import torch
import torch.nn as nn

from .appearance import FusionShapeError


@runtime_checkable
class ImageSemanticEncoder(Protocol):
    def encode_image(self, images: torch.Tensor) -> torch.Tensor:
        """[b, H, W, 3] in [-1,1] -> [b, k, text_dim] semantic tokens."""
        ...


class TinyImageSummarizer(nn.Module):
    """Small strided conv stack pooled to a single semantic token."""

    def __init__(self, text_dim: int, hidden: int = 32):
        super().__init__()
        self.net = nn.Sequential(
            nn.Conv2d(3, hidden, 3, stride=2, padding=1),
            nn.SiLU(),
            nn.Conv2d(hidden, hidden, 3, stride=2, padding=1),
            nn.SiLU(),
            nn.Conv2d(hidden, text_dim, 3, stride=2, padding=1),
        )

    def encode_image(self, images: torch.Tensor) -> torch.Tensor:
        x = self.net(images.permute(0, 3, 1, 2))
        return x.mean(dim=(2, 3))[:, None, :]  # [b, 1, text_dim]

    forward = encode_image


class HashTextEncoder(nn.Module):
    """Deterministic bag-of-words text tokens: each word hashes to a learned
    embedding row. A stand-in for a real text encoder at desk scale."""

    def __init__(self, text_dim: int, vocab_size: int = 512):
        super().__init__()
        self.vocab_size = vocab_size
        self.embed = nn.Embedding(vocab_size, text_dim)

    def token_ids(self, text: str | None) -> list[int]:
        if not text:
            return []
        ids = []
        for word in text.lower().split():
            digest = hashlib.md5(word.encode("utf-8")).digest()
            ids.append(int.from_bytes(digest[:4], "little") % self.vocab_size)
        return ids

    def encode_text(self, text: str | None, batch: int = 1) -> torch.Tensor:
        ids = self.token_ids(text)
        if not ids:
            return torch.zeros(
                batch, 0, self.embed.embedding_dim, dtype=self.embed.weight.dtype
            )
        tokens = self.embed(torch.tensor(ids))
        return tokens[None].expand(batch, -1, -1)


def semantic_token_fusion(
    text_tokens: torch.Tensor,
    human_sem: torch.Tensor,
    object_sem: torch.Tensor,
) -> torch.Tensor:
    """[text; human_sem; object_sem] along the sequence axis."""
    for name, part in (("human_sem", human_sem), ("object_sem", object_sem)):
        if part.ndim != 3 or part.shape[-1] != text_tokens.shape[-1]:
            raise FusionShapeError(f"{name} must be [b, k, text_dim]")
    return torch.cat([text_tokens, human_sem, object_sem], dim=1)
