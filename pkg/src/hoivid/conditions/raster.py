"""Deterministic rasterization of weak conditions to RGB frame stacks.

Frames come back as uint8 [n, H, W, 3] on black. Rendering is pure numpy
geometry (no font/AA libraries), so identical inputs give byte-identical
buffers. Stroke and dot sizes are fractions of min(H, W), sized to survive
the codec's 8x spatial compression.
"""

from __future__ import annotations

import numpy as np

from .topology import BONES, PART_COLORS
from .types import ConditionError, MotionEncoding, ObjectMotion, SkeletonSequence

SPATIAL_FACTOR = 8
BONE_WIDTH_FRAC = 0.01
DOT_RADIUS_FRAC = 0.02
OBJECT_COLOR = (255, 255, 255)  # pure white dot, distinguishable after compression


def _check_res(res: tuple[int, int]) -> tuple[int, int]:
    height, width = res
    if height % SPATIAL_FACTOR or width % SPATIAL_FACTOR:
        raise ConditionError(
            f"resolution {height}x{width} not divisible by codec factor {SPATIAL_FACTOR}"
        )
    return height, width


def _pixel_centers(height: int, width: int) -> tuple[np.ndarray, np.ndarray]:
    ys = np.arange(height, dtype=np.float64) + 0.5
    xs = np.arange(width, dtype=np.float64) + 0.5
    return np.meshgrid(xs, ys)  # xx, yy each [H, W]


def _paint_disk(frame: np.ndarray, cx: float, cy: float, radius: float, color) -> None:
    height, width = frame.shape[:2]
    xx, yy = _pixel_centers(height, width)
    mask = (xx - cx) ** 2 + (yy - cy) ** 2 <= radius**2
    frame[mask] = color


def _paint_segment(frame, x0, y0, x1, y1, half_width, color) -> None:
    """Fill pixels whose center lies within half_width of the segment."""
    height, width = frame.shape[:2]
    xx, yy = _pixel_centers(height, width)
    dx, dy = x1 - x0, y1 - y0
    seg_len2 = dx * dx + dy * dy
    if seg_len2 == 0.0:
        _paint_disk(frame, x0, y0, half_width, color)
        return
    t = ((xx - x0) * dx + (yy - y0) * dy) / seg_len2
    t = np.clip(t, 0.0, 1.0)
    dist2 = (xx - (x0 + t * dx)) ** 2 + (yy - (y0 + t * dy)) ** 2
    frame[dist2 <= half_width**2] = color


def rasterize_pose(seq: SkeletonSequence, res: tuple[int, int]) -> np.ndarray:
    """Draw each present bone as a part-colored segment; lone joints as dots."""
    height, width = _check_res(res)
    scale = min(height, width)
    half_width = max(BONE_WIDTH_FRAC * scale, 1.0) / 2.0
    dot_radius = max(DOT_RADIUS_FRAC * scale, 1.0)

    video = np.zeros((seq.n, height, width, 3), dtype=np.uint8)
    for i, skel_frame in enumerate(seq.frames):
        pts = skel_frame.present_joints()
        px = {jid: (x * width, y * height) for jid, (x, y) in pts.items()}
        in_bone: set[str] = set()
        for a, b, part in BONES:
            if a in px and b in px:
                in_bone.update((a, b))
                (x0, y0), (x1, y1) = px[a], px[b]
                _paint_segment(video[i], x0, y0, x1, y1, half_width, PART_COLORS[part])
        for a, b, part in BONES:  # lone joints: dot in their bone's color
            for jid in (a, b):
                if jid in px and jid not in in_bone:
                    in_bone.add(jid)
                    _paint_disk(video[i], px[jid][0], px[jid][1], dot_radius, PART_COLORS[part])
    return video


def _bbox_corners(cx, cy, w, h, theta, width, height) -> list[tuple[float, float]]:
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    corners = []
    for sx, sy in ((-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)):
        ox, oy = sx * w, sy * h
        rx = cx + ox * cos_t - oy * sin_t
        ry = cy + ox * sin_t + oy * cos_t
        corners.append((rx * width, ry * height))
    return corners


def rasterize_object_motion(m: ObjectMotion, res: tuple[int, int]) -> np.ndarray:
    height, width = res
    scale = min(height, width)
    dot_radius = max(DOT_RADIUS_FRAC * scale, 1.0)
    half_width = max(BONE_WIDTH_FRAC * scale, 1.0) / 2.0

    video = np.zeros((m.n, height, width, 3), dtype=np.uint8)
    for i in range(m.n):
        row = m.frames[i]
        if m.encoding is MotionEncoding.DOT:
            _paint_disk(video[i], row[0] * width, row[1] * height, dot_radius, OBJECT_COLOR)
        elif m.encoding is MotionEncoding.BBOX:
            corners = _bbox_corners(row[0], row[1], row[2], row[3], row[4], width, height)
            for (x0, y0), (x1, y1) in zip(corners, corners[1:] + corners[:1]):
                _paint_segment(video[i], x0, y0, x1, y1, half_width, OBJECT_COLOR)
        else:  # gaussian dot: intensity exp(-r^2 / 2 sigma^2), clipped to [0,1]
            cx, cy, sigma = row[0] * width, row[1] * height, row[2] * scale
            xx, yy = _pixel_centers(height, width)
            r2 = (xx - cx) ** 2 + (yy - cy) ** 2
            intensity = np.clip(np.exp(-r2 / (2.0 * sigma**2)), 0.0, 1.0)
            video[i] = np.round(intensity[..., None] * 255.0).astype(np.uint8)
    return video


def composite_motion_raster(
    seq: SkeletonSequence, m: ObjectMotion, res: tuple[int, int]
) -> np.ndarray:
    """Single composite map fusing pose and trajectory (shared-encoder ablation)."""
    return np.maximum(rasterize_pose(seq, res), rasterize_object_motion(m, res))
