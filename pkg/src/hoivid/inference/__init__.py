from .sampler import SamplerConfig, SamplerError, initial_noise, sample
from .segments import (
    SegmentPlan,
    SegmentPlanError,
    blend_segments,
    long_video_sample,
    plan_segments,
    slice_inputs,
)

__all__ = [
    "SamplerConfig",
    "SamplerError",
    "SegmentPlan",
    "SegmentPlanError",
    "blend_segments",
    "initial_noise",
    "long_video_sample",
    "plan_segments",
    "sample",
    "slice_inputs",
]
