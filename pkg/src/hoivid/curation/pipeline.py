"""Depth-aware interaction filtering over clip directories.

Selection runs in three steps per clip: interaction recognition (short-
circuits on a negative), object/hand segmentation, and the depth comparison
keeping only clips whose object and hand regions sit at similar depths
(physical-contact evidence). Records append to a JSON-lines manifest as they
complete; reruns skip clips already present, so interrupted runs resume to
an identical manifest.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ..io.frames import read_frames
from .backends import PerceptionBackends

DEFAULT_TAU_REL = 0.15
DEFAULT_SAMPLE_RATE = 5


class DepthFilterError(ValueError):
    pass


class DepthVerdict(NamedTuple):
    keep: bool
    delta: float
    reason: str | None = None


def depth_filter(
    object_mask: np.ndarray,
    hand_mask: np.ndarray,
    depth_map: np.ndarray,
    tau_rel: float = DEFAULT_TAU_REL,
    mode: str = "relative",
) -> DepthVerdict:
    """Keep iff the object's and hand's mean depths are similar.

    relative (default): delta = |mean_obj - mean_hand| / mean_hand <= tau.
    absolute: delta = |mean_obj - mean_hand| <= tau.
    """
    if (depth_map <= 0).any():
        raise DepthFilterError("depth maps must be strictly positive")
    if mode not in ("relative", "absolute"):
        raise DepthFilterError(f"unknown mode {mode!r}")
    if not object_mask.any():
        return DepthVerdict(False, float("inf"), "no object")
    if not hand_mask.any():
        return DepthVerdict(False, float("inf"), "no hand")
    mean_obj = float(depth_map[object_mask.astype(bool)].mean())
    mean_hand = float(depth_map[hand_mask.astype(bool)].mean())
    gap = abs(mean_obj - mean_hand)
    delta = gap / mean_hand if mode == "relative" else gap
    keep = delta <= tau_rel
    return DepthVerdict(keep, delta, None if keep else "depth gap too large")


def _rle_encode(mask: np.ndarray) -> dict:
    flat = np.asarray(mask, dtype=bool).ravel()
    changes = np.flatnonzero(np.diff(flat.astype(np.int8)))
    runs = np.diff(np.concatenate([[0], changes + 1, [flat.size]]))
    return {
        "shape": list(mask.shape),
        "first": bool(flat[0]) if flat.size else False,
        "runs": runs.tolist(),
    }


def _rle_decode(doc: dict) -> np.ndarray:
    out = np.zeros(int(np.prod(doc["shape"])), dtype=bool)
    value = doc["first"]
    pos = 0
    for run in doc["runs"]:
        if value:
            out[pos : pos + run] = True
        pos += run
        value = not value
    return out.reshape(doc["shape"])


@dataclass
class ClipRecord:
    clip_id: str
    frame_paths: list[str]
    has_hoi: bool = False
    object_caption: str = ""
    object_masks: list[np.ndarray] = field(default_factory=list)
    hand_masks: list[np.ndarray] = field(default_factory=list)
    mean_object_depth: float | None = None
    mean_hand_depth: float | None = None
    frame_deltas: list[float] = field(default_factory=list)
    keep: bool = False
    reject_reason: str | None = None

    def to_json(self) -> dict:
        return {
            "clip_id": self.clip_id,
            "frame_paths": self.frame_paths,
            "has_hoi": self.has_hoi,
            "object_caption": self.object_caption,
            "object_masks": [_rle_encode(m) for m in self.object_masks],
            "hand_masks": [_rle_encode(m) for m in self.hand_masks],
            "mean_object_depth": self.mean_object_depth,
            "mean_hand_depth": self.mean_hand_depth,
            "frame_deltas": self.frame_deltas,
            "keep": self.keep,
            "reject_reason": self.reject_reason,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ClipRecord":
        doc = dict(doc)
        doc["object_masks"] = [_rle_decode(m) for m in doc["object_masks"]]
        doc["hand_masks"] = [_rle_decode(m) for m in doc["hand_masks"]]
        return cls(**doc)


def sampled_indices(n_frames: int, sample_rate: int) -> list[int]:
    return sorted(set(np.linspace(0, n_frames - 1, sample_rate).round().astype(int).tolist()))


def evaluate_clip(
    clip_dir: str | Path,
    backends: PerceptionBackends,
    tau_rel: float = DEFAULT_TAU_REL,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    mode: str = "relative",
) -> ClipRecord:
    clip_dir = Path(clip_dir)
    frames, meta = read_frames(clip_dir)
    idx = sampled_indices(meta["n_frames"], sample_rate)
    record = ClipRecord(
        clip_id=clip_dir.name,
        frame_paths=[str(clip_dir / f"{i:05d}.png") for i in idx],
    )
    try:
        sampled = frames[idx]
        has_hoi, caption = backends.recognizer.recognize(sampled)
        record.has_hoi = bool(has_hoi)
        record.object_caption = caption
        if not has_hoi:
            record.reject_reason = "no interaction detected"
            return record

        object_masks = np.asarray(backends.grounder.ground(sampled, caption))
        hand_masks = np.asarray(backends.hand_segmenter.segment(sampled))
        record.object_masks = [m for m in object_masks]
        record.hand_masks = [m for m in hand_masks]

        passes = 0
        obj_depths, hand_depths = [], []
        for k, frame in enumerate(sampled):
            depth = backends.depth_estimator.estimate(frame)
            verdict = depth_filter(object_masks[k], hand_masks[k], depth, tau_rel, mode)
            record.frame_deltas.append(verdict.delta)
            if verdict.keep:
                passes += 1
            if object_masks[k].any():
                obj_depths.append(float(depth[object_masks[k]].mean()))
            if hand_masks[k].any():
                hand_depths.append(float(depth[hand_masks[k]].mean()))
        if obj_depths:
            record.mean_object_depth = float(np.mean(obj_depths))
        if hand_depths:
            record.mean_hand_depth = float(np.mean(hand_depths))
        record.keep = passes >= (len(sampled) + 1) // 2  # majority of sampled frames
        if not record.keep:
            record.reject_reason = "depth test failed"
    except DepthFilterError:
        raise
    except Exception as err:  # backend failure: record and continue
        record.keep = False
        record.reject_reason = f"backend_error: {err}"
    return record


def load_manifest(path: str | Path) -> list[ClipRecord]:
    records = []
    path = Path(path)
    if not path.exists():
        return records
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(ClipRecord.from_json(json.loads(line)))
    return records


def curate(
    clip_dirs: list[str | Path],
    backends: PerceptionBackends,
    tau_rel: float = DEFAULT_TAU_REL,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    manifest_path: str | Path | None = None,
    workers: int = 1,
    mode: str = "relative",
) -> list[ClipRecord]:
    """Evaluate clips (resumable, bounded worker pool) and return all records
    including any previously persisted ones."""
    done: dict[str, ClipRecord] = {}
    if manifest_path is not None:
        for record in load_manifest(manifest_path):
            done[record.clip_id] = record

    todo = [Path(d) for d in clip_dirs if Path(d).name not in done]
    results: list[ClipRecord] = []
    if todo:
        if workers <= 1:
            results = [evaluate_clip(d, backends, tau_rel, sample_rate, mode) for d in todo]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(
                    pool.map(
                        lambda d: evaluate_clip(d, backends, tau_rel, sample_rate, mode),
                        todo,
                    )
                )
        if manifest_path is not None:
            Path(manifest_path).parent.mkdir(parents=True, exist_ok=True)
            with open(manifest_path, "a", encoding="utf-8") as fh:
                for record in results:
                    fh.write(json.dumps(record.to_json()) + "\n")
                    fh.flush()

    by_id = dict(done)
    for record in results:
        by_id[record.clip_id] = record
    return [by_id[Path(d).name] for d in clip_dirs]
