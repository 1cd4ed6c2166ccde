from .topology import ALL_PARTS, BODY_JOINTS, BONES, BodyPart, JOINT_INDEX, JOINTS, PART_JOINTS, joints_for_parts
from .types import (
    AudioTrack,
    ConditionClip,
    ConditionError,
    Joint,
    MotionEncoding,
    ObjectMotion,
    SkeletonFrame,
    SkeletonSequence,
    interpolate_keyframes,
    prune_skeleton,
)
from .raster import (
    SPATIAL_FACTOR,
    composite_motion_raster,
    rasterize_object_motion,
    rasterize_pose,
)
from .files import (
    ConditionFileError,
    SCHEMA_VERSION,
    attach_audio,
    condition_from_json,
    condition_to_json,
    load_condition_file,
    save_condition_file,
    validate_condition_json,
)

__all__ = [
    "ALL_PARTS",
    "AudioTrack",
    "BODY_JOINTS",
    "BONES",
    "BodyPart",
    "ConditionClip",
    "ConditionError",
    "ConditionFileError",
    "JOINT_INDEX",
    "JOINTS",
    "Joint",
    "MotionEncoding",
    "ObjectMotion",
    "PART_JOINTS",
    "SCHEMA_VERSION",
    "SPATIAL_FACTOR",
    "SkeletonFrame",
    "SkeletonSequence",
    "attach_audio",
    "composite_motion_raster",
    "condition_from_json",
    "condition_to_json",
    "interpolate_keyframes",
    "joints_for_parts",
    "load_condition_file",
    "prune_skeleton",
    "rasterize_object_motion",
    "rasterize_pose",
    "save_condition_file",
    "validate_condition_json",
]
