// Mirrors the condition-file JSON contract served and consumed by the core.

export type BodyPartLabel = "arms" | "hands/fingers" | "torso" | "legs" | "head";

export const ALL_PARTS: BodyPartLabel[] = ["arms", "hands/fingers", "torso", "legs", "head"];

export type MotionEncoding = "dot" | "bbox" | "gaussian_dot";

export type JointJson = {
  id: string;
  x: number;
  y: number;
  present: boolean;
};

export type SkeletonFrameJson = { joints: JointJson[] };

export type MotionFrameJson = Record<string, number>;

export type ConditionFile = {
  version: number;
  n: number;
  skeleton: {
    retained_parts: BodyPartLabel[];
    frames: SkeletonFrameJson[];
  };
  object_motion: {
    encoding: MotionEncoding;
    frames: MotionFrameJson[];
  };
  object_paste_size: [number, number];
  text: string | null;
  audio_path: string | null;
  face_boxes: number[][] | null;
};

export type NormalizedBox = { cx: number; cy: number; w: number; h: number };

// Joint ids grouped by editable part (matches the core topology).
export const PART_JOINTS: Record<BodyPartLabel, string[]> = {
  head: ["nose", "left_eye", "right_eye", "left_ear", "right_ear"],
  torso: ["left_shoulder", "right_shoulder", "left_hip", "right_hip"],
  arms: [
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
  ],
  legs: ["left_hip", "right_hip", "left_knee", "right_knee", "left_ankle", "right_ankle"],
  "hands/fingers": [
    ...Array.from({ length: 21 }, (_, i) => `left_hand_${String(i).padStart(2, "0")}`),
    ...Array.from({ length: 21 }, (_, i) => `right_hand_${String(i).padStart(2, "0")}`),
  ],
};

export const BONES: [string, string][] = [
  ["nose", "left_eye"],
  ["nose", "right_eye"],
  ["left_eye", "left_ear"],
  ["right_eye", "right_ear"],
  ["left_shoulder", "right_shoulder"],
  ["left_shoulder", "left_hip"],
  ["right_shoulder", "right_hip"],
  ["left_hip", "right_hip"],
  ["left_shoulder", "left_elbow"],
  ["left_elbow", "left_wrist"],
  ["right_shoulder", "right_elbow"],
  ["right_elbow", "right_wrist"],
  ["left_hip", "left_knee"],
  ["left_knee", "left_ankle"],
  ["right_hip", "right_knee"],
  ["right_knee", "right_ankle"],
];

export function jointsForParts(parts: BodyPartLabel[]): Set<string> {
  const out = new Set<string>();
  for (const part of parts) for (const j of PART_JOINTS[part]) out.add(j);
  return out;
}

export function clamp01(v: number): number {
  return Math.max(0, Math.min(1, v));
}
