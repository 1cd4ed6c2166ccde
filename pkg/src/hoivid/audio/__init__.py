from .features import (
    AudioFeatureExtractor,
    AudioFormatError,
    MelBandExtractor,
    SAMPLE_RATE,
    load_audio_features,
    load_feature_file,
    read_wav,
    write_wav,
)

__all__ = [
    "AudioFeatureExtractor",
    "AudioFormatError",
    "MelBandExtractor",
    "SAMPLE_RATE",
    "load_audio_features",
    "load_feature_file",
    "read_wav",
    "write_wav",
]
