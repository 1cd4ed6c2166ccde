from .backends import (
    DepthEstimator,
    HandSegmenter,
    HoiRecognizer,
    ObjectGrounder,
    PerceptionBackends,
    synthetic_backends,
)
from .pipeline import (
    ClipRecord,
    DEFAULT_SAMPLE_RATE,
    DEFAULT_TAU_REL,
    DepthFilterError,
    DepthVerdict,
    curate,
    depth_filter,
    evaluate_clip,
    load_manifest,
    sampled_indices,
)
from .fixtures import FIXTURE_SPECS, make_depth_fixture

__all__ = [
    "ClipRecord",
    "DEFAULT_SAMPLE_RATE",
    "DEFAULT_TAU_REL",
    "DepthEstimator",
    "DepthFilterError",
    "DepthVerdict",
    "FIXTURE_SPECS",
    "HandSegmenter",
    "HoiRecognizer",
    "ObjectGrounder",
    "PerceptionBackends",
    "curate",
    "depth_filter",
    "evaluate_clip",
    "load_manifest",
    "make_depth_fixture",
    "sampled_indices",
    "synthetic_backends",
]
