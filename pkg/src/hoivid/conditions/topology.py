"""Fixed 2D keypoint topology: 17 body joints plus 21 joints per hand.

The layout follows the common whole-body convention (COCO body order,
wrist-rooted five-finger chains per hand). Joints are grouped into five
editable parts; a joint may belong to more than one part (shoulders sit in
both arms and torso) so that pruning to any part keeps its bones drawable.
"""

from __future__ import annotations

from enum import Enum


class BodyPart(str, Enum):
    ARMS = "arms"
    HANDS = "hands/fingers"
    TORSO = "torso"
    LEGS = "legs"
    HEAD = "head"


ALL_PARTS: frozenset[BodyPart] = frozenset(BodyPart)

BODY_JOINTS: tuple[str, ...] = (
    "nose",
    "left_eye",
    "right_eye",
    "left_ear",
    "right_ear",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
)

LEFT_HAND_JOINTS: tuple[str, ...] = tuple(f"left_hand_{i:02d}" for i in range(21))
RIGHT_HAND_JOINTS: tuple[str, ...] = tuple(f"right_hand_{i:02d}" for i in range(21))

JOINTS: tuple[str, ...] = BODY_JOINTS + LEFT_HAND_JOINTS + RIGHT_HAND_JOINTS
JOINT_INDEX: dict[str, int] = {name: i for i, name in enumerate(JOINTS)}

PART_JOINTS: dict[BodyPart, frozenset[str]] = {
    BodyPart.HEAD: frozenset({"nose", "left_eye", "right_eye", "left_ear", "right_ear"}),
    BodyPart.TORSO: frozenset({"left_shoulder", "right_shoulder", "left_hip", "right_hip"}),
    BodyPart.ARMS: frozenset(
        {
            "left_shoulder",
            "right_shoulder",
            "left_elbow",
            "right_elbow",
            "left_wrist",
            "right_wrist",
        }
    ),
    BodyPart.LEGS: frozenset(
        {
            "left_hip",
            "right_hip",
            "left_knee",
            "right_knee",
            "left_ankle",
            "right_ankle",
        }
    ),
    BodyPart.HANDS: frozenset(LEFT_HAND_JOINTS) | frozenset(RIGHT_HAND_JOINTS),
}


def joints_for_parts(parts: frozenset[BodyPart] | set[BodyPart]) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for part in parts:
        out |= PART_JOINTS[part]
    return out


def _hand_bones(prefix: str) -> list[tuple[str, str, BodyPart]]:
    # Five chains rooted at joint 00: thumb 1-4, index 5-8, middle 9-12,
    # ring 13-16, pinky 17-20.
    bones = []
    for base in (1, 5, 9, 13, 17):
        chain = [0, base, base + 1, base + 2, base + 3]
        for a, b in zip(chain[:-1], chain[1:]):
            bones.append((f"{prefix}_{a:02d}", f"{prefix}_{b:02d}", BodyPart.HANDS))
    return bones


BONES: tuple[tuple[str, str, BodyPart], ...] = tuple(
    [
        ("nose", "left_eye", BodyPart.HEAD),
        ("nose", "right_eye", BodyPart.HEAD),
        ("left_eye", "left_ear", BodyPart.HEAD),
        ("right_eye", "right_ear", BodyPart.HEAD),
        ("left_shoulder", "right_shoulder", BodyPart.TORSO),
        ("left_shoulder", "left_hip", BodyPart.TORSO),
        ("right_shoulder", "right_hip", BodyPart.TORSO),
        ("left_hip", "right_hip", BodyPart.TORSO),
        ("left_shoulder", "left_elbow", BodyPart.ARMS),
        ("left_elbow", "left_wrist", BodyPart.ARMS),
        ("right_shoulder", "right_elbow", BodyPart.ARMS),
        ("right_elbow", "right_wrist", BodyPart.ARMS),
        ("left_wrist", "left_hand_00", BodyPart.HANDS),
        ("right_wrist", "right_hand_00", BodyPart.HANDS),
        ("left_hip", "left_knee", BodyPart.LEGS),
        ("left_knee", "left_ankle", BodyPart.LEGS),
        ("right_hip", "right_knee", BodyPart.LEGS),
        ("right_knee", "right_ankle", BodyPart.LEGS),
    ]
    + _hand_bones("left_hand")
    + _hand_bones("right_hand")
)

# Bone colors by part, chosen saturated so that conditioning survives the
# codec's 8x spatial compression.
PART_COLORS: dict[BodyPart, tuple[int, int, int]] = {
    BodyPart.HEAD: (255, 0, 255),
    BodyPart.TORSO: (255, 128, 0),
    BodyPart.ARMS: (0, 255, 0),
    BodyPart.LEGS: (0, 128, 255),
    BodyPart.HANDS: (255, 255, 0),
}
