"""Pluggable perception interfaces and the synthetic-scene implementations.

Real recognition/grounding/segmentation/depth models are out of scope; the
synthetic backends perceive the color-coded fixture scenes (object regions
red-dominant, hand regions green-dominant, depth encoded in the blue
channel), which makes the pipeline's logic testable end to end with
known-truth layouts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

# Blue-channel depth code: depth = DEPTH_MIN + (DEPTH_MAX - DEPTH_MIN) * b/255.
DEPTH_MIN = 0.5
DEPTH_MAX = 5.0


@runtime_checkable
class HoiRecognizer(Protocol):
    def recognize(self, frames: np.ndarray) -> tuple[bool, str]:
        """[k, H, W, 3] uint8 sampled frames -> (has_hoi, object_caption)."""
        ...


@runtime_checkable
class ObjectGrounder(Protocol):
    def ground(self, frames: np.ndarray, caption: str) -> np.ndarray:
        """-> [k, H, W] boolean object masks."""
        ...


@runtime_checkable
class HandSegmenter(Protocol):
    def segment(self, frames: np.ndarray) -> np.ndarray:
        """-> [k, H, W] boolean hand masks."""
        ...


@runtime_checkable
class DepthEstimator(Protocol):
    def estimate(self, frame: np.ndarray) -> np.ndarray:
        """[H, W, 3] uint8 -> strictly positive depth map [H, W]."""
        ...


@dataclass
class PerceptionBackends:
    recognizer: HoiRecognizer
    grounder: ObjectGrounder
    hand_segmenter: HandSegmenter
    depth_estimator: DepthEstimator


def _red_mask(frames: np.ndarray) -> np.ndarray:
    r, g = frames[..., 0].astype(int), frames[..., 1].astype(int)
    return (r > 200) & (g < 100)


def _green_mask(frames: np.ndarray) -> np.ndarray:
    r, g = frames[..., 0].astype(int), frames[..., 1].astype(int)
    return (g > 200) & (r < 100)


class SyntheticRecognizer:
    min_pixels = 4

    def recognize(self, frames: np.ndarray) -> tuple[bool, str]:
        has_obj = _red_mask(frames).sum() >= self.min_pixels
        has_hand = _green_mask(frames).sum() >= self.min_pixels
        return bool(has_obj and has_hand), "a handheld colored object" if has_obj else ""


class SyntheticGrounder:
    def ground(self, frames: np.ndarray, caption: str) -> np.ndarray:
        return _red_mask(frames)


class SyntheticHandSegmenter:
    def segment(self, frames: np.ndarray) -> np.ndarray:
        return _green_mask(frames)


class SyntheticDepthEstimator:
    def estimate(self, frame: np.ndarray) -> np.ndarray:
        blue = frame[..., 2].astype(np.float64)
        return DEPTH_MIN + (DEPTH_MAX - DEPTH_MIN) * blue / 255.0


def synthetic_backends() -> PerceptionBackends:
    return PerceptionBackends(
        recognizer=SyntheticRecognizer(),
        grounder=SyntheticGrounder(),
        hand_segmenter=SyntheticHandSegmenter(),
        depth_estimator=SyntheticDepthEstimator(),
    )


def depth_to_blue(depth: float) -> int:
    return int(round((depth - DEPTH_MIN) / (DEPTH_MAX - DEPTH_MIN) * 255.0))
