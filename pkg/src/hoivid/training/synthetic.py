"""Synthetic interaction clips: stick-figure humans moving colored shapes.

Every sample carries ground-truth weak conditions (arm skeleton, object
center trajectory, face box) alongside the rendered video, reference human
image, and object image, so the full conditioning path can be exercised and
overfit without any real footage. Generation is deterministic per seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from ..conditions import (
    BodyPart,
    ConditionClip,
    Joint,
    MotionEncoding,
    ObjectMotion,
    SkeletonFrame,
    SkeletonSequence,
)

_BACKGROUNDS = [
    ((-0.55, -0.45, -0.25), (-0.25, -0.15, 0.05)),
    ((-0.35, -0.55, -0.45), (0.0, -0.2, -0.1)),
    ((-0.5, -0.3, -0.5), (-0.1, 0.1, -0.1)),
]
_OBJECT_COLORS = [
    (0.9, -0.6, -0.6),
    (-0.6, 0.9, -0.5),
    (-0.5, -0.5, 0.95),
    (0.9, 0.8, -0.5),
    (0.85, -0.4, 0.85),
    (-0.4, 0.85, 0.85),
]
_SHIRT_COLORS = [(0.2, 0.35, 0.7), (0.6, 0.25, 0.2), (0.25, 0.55, 0.3)]
_SKIN = (0.75, 0.55, 0.35)


@dataclass
class TrainSample:
    video: np.ndarray  # [n, H, W, 3] float32 in [-1, 1]
    conditions: ConditionClip
    human_image: np.ndarray  # [H, W, 3] reference appearance (no object)
    object_image: np.ndarray  # [S, S, 3] object on black
    stage: str = "stage2"


def _grid(height, width):
    ys = np.arange(height, dtype=np.float64) + 0.5
    xs = np.arange(width, dtype=np.float64) + 0.5
    return np.meshgrid(xs, ys)


# Painters feather edges by ~1px; soft boundaries keep the toy codec's
# reconstruction error from concentrating on aliased silhouettes.
_FEATHER = 1.0


def _blend(canvas, alpha, color):
    canvas[:] = canvas * (1 - alpha[..., None]) + np.asarray(color)[None, None, :] * alpha[..., None]


def _disk(canvas, cx, cy, radius, color):
    xx, yy = _grid(*canvas.shape[:2])
    dist = np.hypot(xx - cx, yy - cy)
    _blend(canvas, np.clip((radius - dist) / _FEATHER + 0.5, 0.0, 1.0), color)


def _box(canvas, cx, cy, half, color):
    xx, yy = _grid(*canvas.shape[:2])
    dist = np.maximum(np.abs(xx - cx), np.abs(yy - cy))
    _blend(canvas, np.clip((half - dist) / _FEATHER + 0.5, 0.0, 1.0), color)


def _segment(canvas, x0, y0, x1, y1, half_width, color):
    xx, yy = _grid(*canvas.shape[:2])
    dx, dy = x1 - x0, y1 - y0
    seg = dx * dx + dy * dy
    if seg == 0:
        _disk(canvas, x0, y0, half_width, color)
        return
    t = np.clip(((xx - x0) * dx + (yy - y0) * dy) / seg, 0.0, 1.0)
    dist = np.hypot(xx - (x0 + t * dx), yy - (y0 + t * dy))
    _blend(canvas, np.clip((half_width - dist) / _FEATHER + 0.5, 0.0, 1.0), color)


def _background(height, width, which):
    top, bottom = _BACKGROUNDS[which % len(_BACKGROUNDS)]
    ramp = np.linspace(0.0, 1.0, height)[:, None, None]
    return (
        np.asarray(top)[None, None, :] * (1 - ramp)
        + np.asarray(bottom)[None, None, :] * ramp
    ) * np.ones((height, width, 3))


def _figure_pose(k: int, n: int, swing: float, phase: float) -> dict[str, tuple[float, float]]:
    """Normalized joint positions for a left-of-frame stick figure whose right
    arm swings; the wrist is what carries the object."""
    t = k / max(n - 1, 1)
    angle = phase + swing * np.sin(2 * np.pi * t)
    shoulder = (0.30, 0.42)
    elbow = (shoulder[0] + 0.13 * np.cos(angle * 0.5), shoulder[1] + 0.13 * np.sin(angle * 0.5) + 0.05)
    wrist = (elbow[0] + 0.16 * np.cos(angle), elbow[1] + 0.16 * np.sin(angle))
    return {
        "nose": (0.26, 0.22),
        "left_shoulder": (0.22, 0.42),
        "right_shoulder": shoulder,
        "left_hip": (0.23, 0.68),
        "right_hip": (0.29, 0.68),
        "left_knee": (0.22, 0.84),
        "right_knee": (0.30, 0.84),
        "left_ankle": (0.22, 0.97),
        "right_ankle": (0.31, 0.97),
        "right_elbow": (float(np.clip(elbow[0], 0, 1)), float(np.clip(elbow[1], 0, 1))),
        "right_wrist": (float(np.clip(wrist[0], 0, 1)), float(np.clip(wrist[1], 0, 1))),
    }


def _draw_figure(canvas, pose, shirt, height, width):
    def px(p):
        return p[0] * width, p[1] * height

    stroke = max(0.018 * min(height, width), 1.0)
    for a, b in (
        ("left_shoulder", "right_shoulder"),
        ("left_shoulder", "left_hip"),
        ("right_shoulder", "right_hip"),
        ("left_hip", "right_hip"),
    ):
        _segment(canvas, *px(pose[a]), *px(pose[b]), stroke, shirt)
    for a, b in (("right_shoulder", "right_elbow"), ("right_elbow", "right_wrist")):
        _segment(canvas, *px(pose[a]), *px(pose[b]), stroke, _SKIN)
    for a, b in (
        ("left_hip", "left_knee"),
        ("left_knee", "left_ankle"),
        ("right_hip", "right_knee"),
        ("right_knee", "right_ankle"),
    ):
        _segment(canvas, *px(pose[a]), *px(pose[b]), stroke, (0.1, 0.1, 0.2))
    _disk(canvas, *px(pose["nose"]), 0.07 * min(height, width), _SKIN)


def _draw_object(canvas, cx, cy, size_px, color, shape):
    if shape == "disk":
        _disk(canvas, cx, cy, size_px / 2, color)
    else:
        _box(canvas, cx, cy, size_px / 2, color)


def make_synthetic_sample(
    seed: int,
    n_frames: int = 5,
    height: int = 64,
    width: int = 64,
    with_audio: bool = False,
    audio_dim: int = 16,
) -> TrainSample:
    rng = np.random.default_rng(seed)
    bg_idx = int(rng.integers(len(_BACKGROUNDS)))
    shirt = _SHIRT_COLORS[int(rng.integers(len(_SHIRT_COLORS)))]
    obj_color = _OBJECT_COLORS[int(rng.integers(len(_OBJECT_COLORS)))]
    shape = "disk" if rng.random() < 0.5 else "box"
    swing = float(rng.uniform(0.6, 1.4))
    phase = float(rng.uniform(-0.4, 0.4))
    obj_size = float(rng.uniform(0.16, 0.24))  # normalized side/diameter
    offset = (float(rng.uniform(0.06, 0.12)), float(rng.uniform(-0.04, 0.04)))

    frames = []
    skeleton_frames = []
    centers = []
    face_boxes = []
    human_image = None
    for k in range(n_frames):
        pose = _figure_pose(k, n_frames, swing, phase)
        canvas = _background(height, width, bg_idx).copy()
        _draw_figure(canvas, pose, shirt, height, width)
        if human_image is None:
            human_image = canvas.copy()
        cx = float(np.clip(pose["right_wrist"][0] + offset[0], 0.05, 0.95))
        cy = float(np.clip(pose["right_wrist"][1] + offset[1], 0.05, 0.95))
        _draw_object(canvas, cx * width, cy * height, obj_size * min(height, width), obj_color, shape)
        frames.append(canvas)
        centers.append((cx, cy))
        skeleton_frames.append(
            SkeletonFrame(
                tuple(
                    Joint(j, *pose[j])
                    for j in ("right_shoulder", "right_elbow", "right_wrist")
                )
            )
        )
        hx, hy = pose["nose"]
        face_boxes.append([hx, hy, 0.18, 0.18])

    video = np.clip(np.stack(frames), -1.0, 1.0).astype(np.float32)
    # Object reference at full video resolution so its latent patchifies into
    # one token frame matching the video grid.
    obj_canvas = np.full((height, width, 3), -1.0)
    _draw_object(
        obj_canvas, width / 2, height / 2, 0.5 * min(height, width), obj_color, shape
    )

    audio = None
    if with_audio:
        base = rng.uniform(0.1, 1.0, size=(audio_dim,))
        steps = np.arange(n_frames)[:, None]
        audio = (base[None, :] * (0.5 + 0.5 * np.sin(steps * 0.7 + base[None, :] * 6))).astype(
            np.float32
        )

    from ..conditions import AudioTrack

    conditions = ConditionClip(
        skeleton=SkeletonSequence(tuple(skeleton_frames), frozenset({BodyPart.ARMS})),
        object_motion=ObjectMotion(MotionEncoding.DOT, np.asarray(centers)),
        object_paste_size=(obj_size, obj_size),
        text=f"a person moves a {shape}",
        audio=None if audio is None else AudioTrack(audio),
        face_boxes=np.asarray(face_boxes),
    )
    return TrainSample(
        video=video,
        conditions=conditions,
        human_image=human_image.astype(np.float32),
        object_image=obj_canvas.astype(np.float32),
    )


def make_synthetic_set(
    count: int = 8,
    n_frames: int = 5,
    height: int = 64,
    width: int = 64,
    seed: int = 0,
    with_audio: bool = False,
) -> list[TrainSample]:
    return [
        make_synthetic_sample(seed * 1000 + i, n_frames, height, width, with_audio)
        for i in range(count)
    ]


def make_codec_clips(
    count: int = 4, n_frames: int = 5, height: int = 32, width: int = 32, seed: int = 0
) -> torch.Tensor:
    samples = make_synthetic_set(count, n_frames, height, width, seed=seed)
    return torch.from_numpy(np.stack([s.video for s in samples]))
