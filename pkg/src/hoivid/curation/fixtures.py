"""Synthetic depth-fixture clips with known keep/drop ground truth.

Six clips: three with the object at hand depth (true interactions) and
three with a background object far behind the hand. Scenes are color-coded
for the synthetic perception backends; depths chosen so the relative gap is
~0.05 for interactions and ~0.5 for background objects.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..io.frames import write_frames
from .backends import depth_to_blue

FIXTURE_SPECS = [
    # (clip_id, hand_depth, object_depth, expected_keep)
    ("interact_00", 2.0, 2.1, True),
    ("interact_01", 1.5, 1.45, True),
    ("interact_02", 3.0, 3.2, True),
    ("background_00", 2.0, 3.2, False),
    ("background_01", 1.5, 3.5, False),
    ("background_02", 2.5, 4.4, False),
]


def _scene_frames(n_frames, size, hand_depth, object_depth, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    bg_blue = depth_to_blue(4.6)
    frames = np.zeros((n_frames, size, size, 3), dtype=np.uint8)
    frames[..., 0] = 60
    frames[..., 1] = 60
    frames[..., 2] = bg_blue

    hand_xy = rng.integers(8, size - 24, size=2)
    obj_xy = hand_xy + rng.integers(-6, 7, size=2)
    obj_xy = np.clip(obj_xy, 4, size - 20)
    for i in range(n_frames):
        dy = int(round(2 * np.sin(i)))
        hy, hx = int(hand_xy[1]) + dy, int(hand_xy[0])
        oy, ox = int(obj_xy[1]) + dy, int(obj_xy[0]) + i % 3
        frames[i, hy : hy + 12, hx : hx + 12] = (0, 255, depth_to_blue(hand_depth))
        frames[i, oy : oy + 10, ox : ox + 10] = (255, 0, depth_to_blue(object_depth))
    return frames


def make_depth_fixture(
    root: str | Path, n_frames: int = 9, size: int = 64, seed: int = 0
) -> list[tuple[Path, bool]]:
    """Write the six fixture clips under root; returns (clip_dir, expected_keep)."""
    root = Path(root)
    out = []
    for i, (clip_id, hand_depth, object_depth, keep) in enumerate(FIXTURE_SPECS):
        frames = _scene_frames(n_frames, size, hand_depth, object_depth, seed * 100 + i)
        clip_dir = root / clip_id
        write_frames(frames, clip_dir)
        out.append((clip_dir, keep))
    return out
