from .flow import (
    FlowMatchError,
    flow_match_loss,
    interpolate_path,
    sample_timesteps,
    target_velocity,
)
from .augment import (
    AugmentParams,
    MAX_SHIFT_FRAC,
    ROTATION_RANGE_DEG,
    SCALE_RANGE,
    apply_augment,
    augment_object,
    sample_augment_params,
)
from .synthetic import TrainSample, make_codec_clips, make_synthetic_sample, make_synthetic_set
from .stages import (
    MissingCheckpointError,
    StageResult,
    StageSchedule,
    StageSpec,
    prepare_inputs,
    run_schedule,
    run_stage,
    write_loss_log,
)

__all__ = [
    "AugmentParams",
    "FlowMatchError",
    "MAX_SHIFT_FRAC",
    "MissingCheckpointError",
    "ROTATION_RANGE_DEG",
    "SCALE_RANGE",
    "StageResult",
    "StageSchedule",
    "StageSpec",
    "TrainSample",
    "apply_augment",
    "augment_object",
    "flow_match_loss",
    "interpolate_path",
    "make_codec_clips",
    "make_synthetic_sample",
    "make_synthetic_set",
    "prepare_inputs",
    "run_schedule",
    "run_stage",
    "sample_augment_params",
    "sample_timesteps",
    "target_velocity",
    "write_loss_log",
]
