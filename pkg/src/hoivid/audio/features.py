"""Audio feature extraction for the speech side channel.

The default extractor computes log mel-band energies per video frame from
raw mono WAV audio (16 kHz, little-endian PCM16). A feature file (JSON array
of per-frame vectors) can replace the extractor entirely; anything
producing one feature row per video frame satisfies the interface.
"""

from __future__ import annotations

import json
import wave
from pathlib import Path
from typing import Protocol, runtime_checkable

import numpy as np

SAMPLE_RATE = 16000


class AudioFormatError(ValueError):
    pass


@runtime_checkable
class AudioFeatureExtractor(Protocol):
    feature_dim: int

    def extract(self, samples: np.ndarray, n_frames: int) -> np.ndarray:
        """Mono samples [-1,1] -> per-video-frame features [n_frames, dim]."""
        ...


def read_wav(path: str | Path) -> np.ndarray:
    """Mono 16 kHz PCM16 WAV -> float32 samples in [-1, 1]."""
    with wave.open(str(path), "rb") as wav:
        if wav.getnchannels() != 1:
            raise AudioFormatError("expected mono audio")
        if wav.getsampwidth() != 2:
            raise AudioFormatError("expected 16-bit PCM")
        if wav.getframerate() != SAMPLE_RATE:
            raise AudioFormatError(f"expected {SAMPLE_RATE} Hz, got {wav.getframerate()}")
        raw = wav.readframes(wav.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float32)
    return samples / 32768.0


def write_wav(samples: np.ndarray, path: str | Path) -> None:
    pcm = np.clip(samples, -1.0, 1.0)
    pcm = np.round(pcm * 32767.0).astype("<i2")
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(SAMPLE_RATE)
        wav.writeframes(pcm.tobytes())


def _mel_filterbank(n_bands: int, n_fft: int, sample_rate: int) -> np.ndarray:
    def hz_to_mel(f):
        return 2595.0 * np.log10(1.0 + f / 700.0)

    def mel_to_hz(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    mel_points = np.linspace(hz_to_mel(0.0), hz_to_mel(sample_rate / 2), n_bands + 2)
    hz_points = mel_to_hz(mel_points)
    bins = np.floor((n_fft + 1) * hz_points / sample_rate).astype(int)
    bank = np.zeros((n_bands, n_fft // 2 + 1))
    for b in range(n_bands):
        lo, mid, hi = bins[b], bins[b + 1], bins[b + 2]
        for k in range(lo, mid):
            if mid > lo:
                bank[b, k] = (k - lo) / (mid - lo)
        for k in range(mid, hi):
            if hi > mid:
                bank[b, k] = (hi - k) / (hi - mid)
    return bank


class MelBandExtractor:
    """Per-video-frame log mel-band energies."""

    def __init__(self, feature_dim: int = 16, n_fft: int = 512):
        self.feature_dim = feature_dim
        self.n_fft = n_fft
        self._bank = _mel_filterbank(feature_dim, n_fft, SAMPLE_RATE)

    def extract(self, samples: np.ndarray, n_frames: int) -> np.ndarray:
        if n_frames < 1:
            raise AudioFormatError("n_frames must be >= 1")
        windows = np.array_split(samples.astype(np.float64), n_frames)
        feats = np.zeros((n_frames, self.feature_dim), dtype=np.float32)
        for i, chunk in enumerate(windows):
            if chunk.size == 0:
                continue
            if chunk.size < self.n_fft:
                chunk = np.pad(chunk, (0, self.n_fft - chunk.size))
            spectrum = np.abs(np.fft.rfft(chunk[: self.n_fft]))
            feats[i] = np.log1p(self._bank @ spectrum).astype(np.float32)
        return feats


def load_feature_file(path: str | Path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        rows = json.load(fh)
    arr = np.asarray(rows, dtype=np.float32)
    if arr.ndim != 2:
        raise AudioFormatError("feature file must hold a 2D array [n_frames, dim]")
    return arr


def load_audio_features(
    path: str | Path, n_frames: int, extractor: AudioFeatureExtractor | None = None
) -> np.ndarray:
    """Features from a .json feature file or a .wav via the extractor."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        feats = load_feature_file(path)
        if feats.shape[0] != n_frames:
            raise AudioFormatError(
                f"feature file has {feats.shape[0]} frames, clip needs {n_frames}"
            )
        return feats
    extractor = extractor or MelBandExtractor()
    return extractor.extract(read_wav(path), n_frames)
