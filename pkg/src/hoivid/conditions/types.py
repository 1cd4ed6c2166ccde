"""Value types for the weak motion conditions and keyframe interpolation.

All types are immutable values; operations return new objects and never
mutate their inputs, so they are safe under concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .topology import ALL_PARTS, BodyPart, JOINT_INDEX, joints_for_parts


class ConditionError(ValueError):
    """A weak-condition invariant was violated."""


@dataclass(frozen=True)
class Joint:
    joint_id: str
    x: float
    y: float
    present: bool = True


@dataclass(frozen=True)
class SkeletonFrame:
    joints: tuple[Joint, ...]

    def __post_init__(self):
        seen = set()
        for j in self.joints:
            if j.joint_id not in JOINT_INDEX:
                raise ConditionError(f"unknown joint id {j.joint_id!r}")
            if j.joint_id in seen:
                raise ConditionError(f"duplicate joint id {j.joint_id!r}")
            seen.add(j.joint_id)
            if j.present and not (0.0 <= j.x <= 1.0 and 0.0 <= j.y <= 1.0):
                raise ConditionError(
                    f"joint {j.joint_id!r} coordinates ({j.x}, {j.y}) outside [0,1]^2"
                )

    def present_joints(self) -> dict[str, tuple[float, float]]:
        return {j.joint_id: (j.x, j.y) for j in self.joints if j.present}


@dataclass(frozen=True)
class SkeletonSequence:
    frames: tuple[SkeletonFrame, ...]
    retained_parts: frozenset[BodyPart] = field(default_factory=lambda: ALL_PARTS)

    def __post_init__(self):
        if len(self.frames) < 1:
            raise ConditionError("skeleton sequence must have at least one frame")
        allowed = joints_for_parts(self.retained_parts)
        for i, frame in enumerate(self.frames):
            extra = set(frame.present_joints()) - allowed
            if extra:
                raise ConditionError(
                    f"frame {i} has joints outside retained_parts: {sorted(extra)}"
                )

    @property
    def n(self) -> int:
        return len(self.frames)


class MotionEncoding(str, Enum):
    DOT = "dot"
    BBOX = "bbox"
    GAUSSIAN_DOT = "gaussian_dot"


# payload width per encoding: dot (cx,cy); bbox (cx,cy,w,h,theta); gaussian (cx,cy,sigma)
_PAYLOAD_WIDTH = {
    MotionEncoding.DOT: 2,
    MotionEncoding.BBOX: 5,
    MotionEncoding.GAUSSIAN_DOT: 3,
}


@dataclass(frozen=True)
class ObjectMotion:
    encoding: MotionEncoding
    frames: np.ndarray  # [n, payload_width] float64

    def __post_init__(self):
        arr = np.asarray(self.frames, dtype=np.float64)
        object.__setattr__(self, "frames", arr)
        width = _PAYLOAD_WIDTH[self.encoding]
        if arr.ndim != 2 or arr.shape[1] != width:
            raise ConditionError(
                f"{self.encoding.value} motion needs shape [n,{width}], got {arr.shape}"
            )
        if arr.shape[0] < 1:
            raise ConditionError("object motion must cover at least one frame")
        if not np.isfinite(arr).all():
            raise ConditionError("object motion payload has non-finite values")
        if ((arr[:, 0] < 0) | (arr[:, 0] > 1) | (arr[:, 1] < 0) | (arr[:, 1] > 1)).any():
            raise ConditionError("object center coordinates outside [0,1]")
        if self.encoding is MotionEncoding.BBOX:
            if (arr[:, 2] <= 0).any() or (arr[:, 3] <= 0).any():
                raise ConditionError("bbox width/height must be > 0")
            if (arr[:, 2] > 1).any() or (arr[:, 3] > 1).any():
                raise ConditionError("bbox width/height must be <= 1")
        if self.encoding is MotionEncoding.GAUSSIAN_DOT and (arr[:, 2] <= 0).any():
            raise ConditionError("gaussian sigma must be > 0")

    @property
    def n(self) -> int:
        return int(self.frames.shape[0])

    def centers(self) -> np.ndarray:
        """Per-frame (cx, cy) regardless of encoding."""
        return self.frames[:, :2].copy()


@dataclass(frozen=True)
class AudioTrack:
    """Per-video-frame audio feature vectors, one row per pixel frame."""

    features: np.ndarray  # [n, feature_dim] float32

    def __post_init__(self):
        arr = np.asarray(self.features, dtype=np.float32)
        object.__setattr__(self, "features", arr)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ConditionError(f"audio features need shape [n, d], got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ConditionError("audio features have non-finite values")

    @property
    def n(self) -> int:
        return int(self.features.shape[0])

    @property
    def feature_dim(self) -> int:
        return int(self.features.shape[1])


@dataclass(frozen=True)
class ConditionClip:
    skeleton: SkeletonSequence
    object_motion: ObjectMotion
    object_paste_size: tuple[float, float] = (0.25, 0.25)
    text: str | None = None
    audio: AudioTrack | None = None
    audio_path: str | None = None
    face_boxes: np.ndarray | None = None  # [n, 4] (cx, cy, w, h), optional

    def __post_init__(self):
        n = self.skeleton.n
        if self.object_motion.n != n:
            raise ConditionError(
                f"object motion length {self.object_motion.n} != skeleton length {n}"
            )
        if self.audio is not None and self.audio.n != n:
            raise ConditionError(f"audio length {self.audio.n} != clip length {n}")
        w, h = self.object_paste_size
        if not (w > 0 and h > 0):
            raise ConditionError("object_paste_size must be > 0")
        if self.face_boxes is not None:
            boxes = np.asarray(self.face_boxes, dtype=np.float64)
            object.__setattr__(self, "face_boxes", boxes)
            if boxes.shape != (n, 4):
                raise ConditionError(f"face_boxes need shape [{n},4], got {boxes.shape}")
            if not np.isfinite(boxes).all():
                raise ConditionError("face_boxes have non-finite values")

    @property
    def n(self) -> int:
        return self.skeleton.n


def prune_skeleton(
    seq: SkeletonSequence, keep: set[BodyPart] | frozenset[BodyPart]
) -> SkeletonSequence:
    """Drop every joint not belonging to the kept parts, frame count unchanged."""
    keep = frozenset(keep)
    if not keep:
        raise ConditionError("no conditioning signal: keep set is empty")
    if not keep <= ALL_PARTS:
        raise ConditionError(f"unknown part labels: {keep - ALL_PARTS}")
    allowed = joints_for_parts(keep)
    frames = tuple(
        SkeletonFrame(tuple(j for j in f.joints if j.joint_id in allowed))
        for f in seq.frames
    )
    return SkeletonSequence(frames=frames, retained_parts=keep)


def _lerp(a: float, b: float, t: float) -> float:
    return (1.0 - t) * a + t * b


def _interp_skeleton_span(
    start: SkeletonFrame, end: SkeletonFrame, n_between: int
) -> list[SkeletonFrame]:
    """Frames strictly between two keyframes. Joints absent in either endpoint
    stay absent over the whole span (no joint hallucination)."""
    a = start.present_joints()
    b = end.present_joints()
    shared = sorted(set(a) & set(b))
    out = []
    for k in range(1, n_between + 1):
        t = k / (n_between + 1)
        joints = tuple(
            Joint(jid, _lerp(a[jid][0], b[jid][0], t), _lerp(a[jid][1], b[jid][1], t))
            for jid in shared
        )
        out.append(SkeletonFrame(joints))
    return out


def interpolate_keyframes(
    clip: ConditionClip, edited_frame_indices: list[int]
) -> ConditionClip:
    """Linearly interpolate all per-frame payloads between consecutive edited
    frames; edited frames are preserved exactly."""
    n = clip.n
    idx = list(edited_frame_indices)
    if idx != sorted(idx) or len(set(idx)) != len(idx):
        raise ConditionError("edited_frame_indices must be sorted and unique")
    if any(i < 0 or i >= n for i in idx):
        raise ConditionError("edited_frame_indices out of range")
    if not idx or idx[0] != 0 or idx[-1] != n - 1:
        raise ConditionError("first and last frame must be edited keyframes")

    skel_frames: list[SkeletonFrame] = [clip.skeleton.frames[0]]
    motion = clip.object_motion.frames.copy()
    faces = None if clip.face_boxes is None else clip.face_boxes.copy()
    for lo, hi in zip(idx[:-1], idx[1:]):
        span = hi - lo - 1
        skel_frames.extend(
            _interp_skeleton_span(clip.skeleton.frames[lo], clip.skeleton.frames[hi], span)
        )
        skel_frames.append(clip.skeleton.frames[hi])
        for k in range(1, span + 1):
            t = k / (span + 1)
            motion[lo + k] = (1.0 - t) * motion[lo] + t * motion[hi]
            if faces is not None:
                faces[lo + k] = (1.0 - t) * faces[lo] + t * faces[hi]

    skeleton = SkeletonSequence(tuple(skel_frames), clip.skeleton.retained_parts)
    return replace(
        clip,
        skeleton=skeleton,
        object_motion=ObjectMotion(clip.object_motion.encoding, motion),
        face_boxes=faces,
    )
