"""Condition-file JSON: the contract between the editor and the core.

Top-level keys: {version, n, skeleton, object_motion, object_paste_size,
text, audio_path} plus the optional face_boxes. Field order is irrelevant,
unknown keys are rejected. Validation reports a JSON-pointer-style path for
every problem so the editor can surface errors inline.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .topology import BodyPart, JOINT_INDEX
from .types import (
    AudioTrack,
    ConditionClip,
    ConditionError,
    Joint,
    MotionEncoding,
    ObjectMotion,
    SkeletonFrame,
    SkeletonSequence,
)

SCHEMA_VERSION = 1

_TOP_KEYS = {
    "version",
    "n",
    "skeleton",
    "object_motion",
    "object_paste_size",
    "text",
    "audio_path",
    "face_boxes",
}
_REQUIRED_KEYS = _TOP_KEYS - {"face_boxes"}
_MOTION_FIELDS = {
    "dot": ("cx", "cy"),
    "bbox": ("cx", "cy", "w", "h", "theta"),
    "gaussian_dot": ("cx", "cy", "sigma"),
}
_PART_VALUES = {p.value for p in BodyPart}


class ConditionFileError(ConditionError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def validate_condition_json(doc) -> list[tuple[str, str]]:
    """Schema plus invariant check. Returns (path, message) pairs; empty means valid."""
    errors: list[tuple[str, str]] = []

    def err(path: str, message: str):
        errors.append((path, message))

    if not isinstance(doc, dict):
        return [("/", "document must be a JSON object")]
    for key in doc:
        if key not in _TOP_KEYS:
            err(f"/{key}", "unknown key")
    for key in _REQUIRED_KEYS:
        if key not in doc:
            err(f"/{key}", "missing required key")
    if errors:
        return errors

    if doc["version"] != SCHEMA_VERSION:
        err("/version", f"unsupported version {doc['version']!r} (expected {SCHEMA_VERSION})")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        err("/n", "n must be a positive integer")
        return errors

    skel = doc["skeleton"]
    if not isinstance(skel, dict) or set(skel) != {"retained_parts", "frames"}:
        err("/skeleton", "must be an object with keys retained_parts, frames")
    else:
        parts = skel["retained_parts"]
        if not isinstance(parts, list) or not parts:
            err("/skeleton/retained_parts", "must be a non-empty list of part labels")
        else:
            for i, p in enumerate(parts):
                if p not in _PART_VALUES:
                    err(f"/skeleton/retained_parts/{i}", f"unknown part {p!r}")
        frames = skel["frames"]
        if not isinstance(frames, list) or len(frames) != n:
            err("/skeleton/frames", f"must be a list of length n={n}")
        else:
            for i, frame in enumerate(frames):
                fpath = f"/skeleton/frames/{i}"
                if not isinstance(frame, dict) or set(frame) != {"joints"}:
                    err(fpath, "must be an object with key joints")
                    continue
                if not isinstance(frame["joints"], list):
                    err(f"{fpath}/joints", "must be a list")
                    continue
                seen = set()
                for k, joint in enumerate(frame["joints"]):
                    jpath = f"{fpath}/joints/{k}"
                    if not isinstance(joint, dict) or not {"id", "x", "y"} <= set(joint):
                        err(jpath, "must be an object with keys id, x, y[, present]")
                        continue
                    if set(joint) - {"id", "x", "y", "present"}:
                        err(jpath, "unknown joint keys")
                        continue
                    if joint["id"] not in JOINT_INDEX:
                        err(f"{jpath}/id", f"unknown joint id {joint['id']!r}")
                        continue
                    if joint["id"] in seen:
                        err(f"{jpath}/id", f"duplicate joint id {joint['id']!r}")
                    seen.add(joint["id"])
                    present = joint.get("present", True)
                    if not isinstance(present, bool):
                        err(f"{jpath}/present", "must be a boolean")
                    if not (_is_num(joint["x"]) and _is_num(joint["y"])):
                        err(jpath, "x and y must be numbers")
                    elif present and not (0 <= joint["x"] <= 1 and 0 <= joint["y"] <= 1):
                        err(jpath, "present joint coordinates must lie in [0,1]^2")

    motion = doc["object_motion"]
    if not isinstance(motion, dict) or set(motion) != {"encoding", "frames"}:
        err("/object_motion", "must be an object with keys encoding, frames")
    elif motion["encoding"] not in _MOTION_FIELDS:
        err("/object_motion/encoding", f"unknown encoding {motion['encoding']!r}")
    else:
        fields = _MOTION_FIELDS[motion["encoding"]]
        frames = motion["frames"]
        if not isinstance(frames, list) or len(frames) != n:
            err("/object_motion/frames", f"must be a list of length n={n}")
        else:
            for i, row in enumerate(frames):
                rpath = f"/object_motion/frames/{i}"
                if not isinstance(row, dict) or set(row) != set(fields):
                    err(rpath, f"must be an object with keys {fields}")
                    continue
                if not all(_is_num(row[f]) for f in fields):
                    err(rpath, "payload values must be numbers")
                    continue
                if not (0 <= row["cx"] <= 1 and 0 <= row["cy"] <= 1):
                    err(rpath, "cx, cy must lie in [0,1]")
                if motion["encoding"] == "bbox" and not (0 < row["w"] <= 1 and 0 < row["h"] <= 1):
                    err(rpath, "bbox w, h must lie in (0,1]")
                if motion["encoding"] == "gaussian_dot" and not row["sigma"] > 0:
                    err(rpath, "sigma must be > 0")

    size = doc["object_paste_size"]
    if (
        not isinstance(size, list)
        or len(size) != 2
        or not all(_is_num(v) for v in size)
    ):
        err("/object_paste_size", "must be [w, h]")
    elif not (size[0] > 0 and size[1] > 0):
        err("/object_paste_size", "must be > 0")

    if doc["text"] is not None and not isinstance(doc["text"], str):
        err("/text", "must be a string or null")
    if doc["audio_path"] is not None and not isinstance(doc["audio_path"], str):
        err("/audio_path", "must be a string or null")

    boxes = doc.get("face_boxes")
    if boxes is not None:
        if not isinstance(boxes, list) or len(boxes) != n:
            err("/face_boxes", f"must be a list of length n={n} or null")
        else:
            for i, box in enumerate(boxes):
                if (
                    not isinstance(box, list)
                    or len(box) != 4
                    or not all(_is_num(v) for v in box)
                ):
                    err(f"/face_boxes/{i}", "must be [cx, cy, w, h]")
    return errors


def condition_from_json(doc) -> ConditionClip:
    errors = validate_condition_json(doc)
    if errors:
        path, message = errors[0]
        raise ConditionFileError(path, message)

    frames = tuple(
        SkeletonFrame(
            tuple(
                Joint(j["id"], float(j["x"]), float(j["y"]), bool(j.get("present", True)))
                for j in frame["joints"]
            )
        )
        for frame in doc["skeleton"]["frames"]
    )
    skeleton = SkeletonSequence(
        frames=frames,
        retained_parts=frozenset(BodyPart(p) for p in doc["skeleton"]["retained_parts"]),
    )
    encoding = MotionEncoding(doc["object_motion"]["encoding"])
    fields = _MOTION_FIELDS[encoding.value]
    payload = np.array(
        [[float(row[f]) for f in fields] for row in doc["object_motion"]["frames"]],
        dtype=np.float64,
    )
    boxes = doc.get("face_boxes")
    return ConditionClip(
        skeleton=skeleton,
        object_motion=ObjectMotion(encoding, payload),
        object_paste_size=(float(doc["object_paste_size"][0]), float(doc["object_paste_size"][1])),
        text=doc["text"],
        audio_path=doc["audio_path"],
        face_boxes=None if boxes is None else np.asarray(boxes, dtype=np.float64),
    )


def condition_to_json(clip: ConditionClip) -> dict:
    fields = _MOTION_FIELDS[clip.object_motion.encoding.value]
    return {
        "version": SCHEMA_VERSION,
        "n": clip.n,
        "skeleton": {
            "retained_parts": sorted(p.value for p in clip.skeleton.retained_parts),
            "frames": [
                {
                    "joints": [
                        {"id": j.joint_id, "x": j.x, "y": j.y, "present": j.present}
                        for j in frame.joints
                    ]
                }
                for frame in clip.skeleton.frames
            ],
        },
        "object_motion": {
            "encoding": clip.object_motion.encoding.value,
            "frames": [
                {f: float(v) for f, v in zip(fields, row)}
                for row in clip.object_motion.frames
            ],
        },
        "object_paste_size": [clip.object_paste_size[0], clip.object_paste_size[1]],
        "text": clip.text,
        "audio_path": clip.audio_path,
        "face_boxes": None
        if clip.face_boxes is None
        else [[float(v) for v in row] for row in clip.face_boxes],
    }


def load_condition_file(path: str | Path) -> ConditionClip:
    with open(path, "r", encoding="utf-8") as fh:
        return condition_from_json(json.load(fh))


def save_condition_file(clip: ConditionClip, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(condition_to_json(clip), fh, indent=2)
        fh.write("\n")


def attach_audio(clip: ConditionClip, features: np.ndarray) -> ConditionClip:
    from dataclasses import replace

    return replace(clip, audio=AudioTrack(features))
