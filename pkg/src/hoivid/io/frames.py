"""Video I/O as directories of numbered PNG frames plus a metadata JSON."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image

METADATA_NAME = "metadata.json"


def to_uint8(video: np.ndarray) -> np.ndarray:
    """Float video in [-1, 1] -> uint8. Uint8 passes through."""
    if video.dtype == np.uint8:
        return video
    return np.round((np.clip(video, -1.0, 1.0) + 1.0) * 127.5).astype(np.uint8)


def to_float(video: np.ndarray) -> np.ndarray:
    """Uint8 video -> float32 in [-1, 1]. Float passes through."""
    if video.dtype != np.uint8:
        return video.astype(np.float32)
    return video.astype(np.float32) / 127.5 - 1.0


def write_frames(video: np.ndarray, out_dir: str | Path, fps: int = 16) -> Path:
    """Write [n, H, W, 3] frames as 00000.png ... plus metadata.json."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    frames = to_uint8(video)
    for i, frame in enumerate(frames):
        Image.fromarray(frame, mode="RGB").save(out_dir / f"{i:05d}.png")
    meta = {"fps": fps, "n_frames": int(frames.shape[0])}
    with open(out_dir / METADATA_NAME, "w", encoding="utf-8") as fh:
        json.dump(meta, fh)
    return out_dir


def read_frames(in_dir: str | Path) -> tuple[np.ndarray, dict]:
    in_dir = Path(in_dir)
    with open(in_dir / METADATA_NAME, "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    frames = [
        np.asarray(Image.open(in_dir / f"{i:05d}.png").convert("RGB"))
        for i in range(meta["n_frames"])
    ]
    return np.stack(frames), meta


def read_image(path: str | Path) -> np.ndarray:
    """Single RGB image as float32 [H, W, 3] in [-1, 1]."""
    return to_float(np.asarray(Image.open(path).convert("RGB")))


def write_image(image: np.ndarray, path: str | Path) -> None:
    Image.fromarray(to_uint8(image), mode="RGB").save(path)
