// Editor document model: a condition file plus UI state, with exact
// undo/redo and lossless (de)serialization.
//
// The editor never interpolates or rasterizes for export itself; those come
// back from the server and are applied with applyServerConditions.

import {
  ALL_PARTS,
  BodyPartLabel,
  ConditionFile,
  JointJson,
  MotionEncoding,
  NormalizedBox,
  clamp01,
  jointsForParts,
} from "./types.js";

export type DocumentError = { field: string; message: string };

type Snapshot = { conditions: ConditionFile; keyframes: number[] };

export type EditorDocument = {
  conditions: ConditionFile;
  keyframes: number[]; // sorted frame indices the user edited
  selectedFrame: number;
  zoom: number;
  undoStack: Snapshot[];
  redoStack: Snapshot[];
};

export function deepCopy<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

const DEFAULT_ARM_POSE: [string, number, number][] = [
  ["right_shoulder", 0.35, 0.4],
  ["right_elbow", 0.48, 0.5],
  ["right_wrist", 0.6, 0.55],
];

export function newDocument(n: number, encoding: MotionEncoding = "dot"): EditorDocument {
  const frames = Array.from({ length: n }, () => ({
    joints: DEFAULT_ARM_POSE.map(([id, x, y]): JointJson => ({ id, x, y, present: true })),
  }));
  const motionFrames = Array.from({ length: n }, (_, i): Record<string, number> => {
    const cx = 0.3 + (0.4 * i) / Math.max(n - 1, 1);
    if (encoding === "bbox") return { cx, cy: 0.5, w: 0.2, h: 0.2, theta: 0 };
    if (encoding === "gaussian_dot") return { cx, cy: 0.5, sigma: 0.05 };
    return { cx, cy: 0.5 };
  });
  return {
    conditions: {
      version: 1,
      n,
      skeleton: { retained_parts: ["arms"], frames },
      object_motion: { encoding, frames: motionFrames },
      object_paste_size: [0.25, 0.25],
      text: null,
      audio_path: null,
      face_boxes: null,
    },
    keyframes: [0, n - 1],
    selectedFrame: 0,
    zoom: 1,
    undoStack: [],
    redoStack: [],
  };
}

function snapshot(doc: EditorDocument): Snapshot {
  return { conditions: deepCopy(doc.conditions), keyframes: [...doc.keyframes] };
}

function pushUndo(doc: EditorDocument): EditorDocument {
  return { ...doc, undoStack: [...doc.undoStack, snapshot(doc)], redoStack: [] };
}

function markKeyframe(keyframes: number[], frame: number): number[] {
  return keyframes.includes(frame) ? keyframes : [...keyframes, frame].sort((a, b) => a - b);
}

export function undo(doc: EditorDocument): EditorDocument {
  const prev = doc.undoStack[doc.undoStack.length - 1];
  if (!prev) return doc;
  return {
    ...doc,
    conditions: deepCopy(prev.conditions),
    keyframes: [...prev.keyframes],
    undoStack: doc.undoStack.slice(0, -1),
    redoStack: [...doc.redoStack, snapshot(doc)],
  };
}

export function redo(doc: EditorDocument): EditorDocument {
  const next = doc.redoStack[doc.redoStack.length - 1];
  if (!next) return doc;
  return {
    ...doc,
    conditions: deepCopy(next.conditions),
    keyframes: [...next.keyframes],
    undoStack: [...doc.undoStack, snapshot(doc)],
    redoStack: doc.redoStack.slice(0, -1),
  };
}

export function setSelectedFrame(doc: EditorDocument, frame: number): EditorDocument {
  const clamped = Math.max(0, Math.min(doc.conditions.n - 1, frame));
  return { ...doc, selectedFrame: clamped };
}

export type DragTarget = { kind: "joint"; jointId: string } | { kind: "object_dot" };

export function dragEdit(
  doc: EditorDocument,
  target: DragTarget,
  frameIndex: number,
  x: number,
  y: number
): EditorDocument {
  if (frameIndex < 0 || frameIndex >= doc.conditions.n) {
    throw new Error(`frame ${frameIndex} out of range`);
  }
  const px = clamp01(x); // drags outside the canvas clamp to [0,1]^2
  const py = clamp01(y);
  const out = pushUndo(doc);
  const conditions = deepCopy(out.conditions);
  if (target.kind === "object_dot") {
    const frame = conditions.object_motion.frames[frameIndex];
    frame.cx = px;
    frame.cy = py;
  } else {
    const joints = conditions.skeleton.frames[frameIndex].joints;
    const joint = joints.find((j) => j.id === target.jointId);
    if (joint) {
      joint.x = px;
      joint.y = py;
      joint.present = true;
    } else {
      const allowed = jointsForParts(conditions.skeleton.retained_parts);
      if (!allowed.has(target.jointId)) {
        throw new Error(`joint ${target.jointId} not in retained parts`);
      }
      joints.push({ id: target.jointId, x: px, y: py, present: true });
    }
  }
  return {
    ...out,
    conditions,
    keyframes: markKeyframe(out.keyframes, frameIndex),
    selectedFrame: frameIndex,
  };
}

export function resizeObjectBox(doc: EditorDocument, box: NormalizedBox): EditorDocument {
  if (box.w <= 0 || box.h <= 0) {
    throw new Error("zero-area box rejected");
  }
  const out = pushUndo(doc);
  const conditions = deepCopy(out.conditions);
  conditions.object_paste_size = [clamp01(box.w), clamp01(box.h)];
  // The box lives on the first frame; keep the dot there in sync.
  const first = conditions.object_motion.frames[0];
  first.cx = clamp01(box.cx);
  first.cy = clamp01(box.cy);
  return { ...out, conditions, keyframes: markKeyframe(out.keyframes, 0) };
}

export function togglePart(doc: EditorDocument, part: BodyPartLabel): EditorDocument {
  const out = pushUndo(doc);
  const conditions = deepCopy(out.conditions);
  const parts = new Set(conditions.skeleton.retained_parts);
  if (parts.has(part)) {
    if (parts.size === 1) throw new Error("at least one part must stay retained");
    parts.delete(part);
    const allowed = jointsForParts([...parts]);
    for (const frame of conditions.skeleton.frames) {
      frame.joints = frame.joints.filter((j) => allowed.has(j.id));
    }
  } else {
    parts.add(part);
  }
  conditions.skeleton.retained_parts = ALL_PARTS.filter((p) => parts.has(p));
  return { ...out, conditions };
}

export function setText(doc: EditorDocument, text: string | null): EditorDocument {
  const out = pushUndo(doc);
  const conditions = deepCopy(out.conditions);
  conditions.text = text && text.length ? text : null;
  return { ...out, conditions };
}

export function applyServerConditions(
  doc: EditorDocument,
  conditions: ConditionFile
): EditorDocument {
  const out = pushUndo(doc);
  return { ...out, conditions: deepCopy(conditions) };
}

export function exportConditions(doc: EditorDocument): ConditionFile {
  return deepCopy(doc.conditions);
}

export function importConditions(raw: unknown): EditorDocument {
  const errors = validateShape(raw);
  if (errors.length) {
    throw new Error(`invalid condition file: ${errors[0].field}: ${errors[0].message}`);
  }
  const conditions = deepCopy(raw) as ConditionFile;
  if (!("face_boxes" in (conditions as object))) {
    conditions.face_boxes = null;
  }
  return {
    conditions,
    keyframes: [0, conditions.n - 1],
    selectedFrame: 0,
    zoom: 1,
    undoStack: [],
    redoStack: [],
  };
}

// Light structural validation; the service owns full schema checking.
export function validateShape(raw: unknown): DocumentError[] {
  const errors: DocumentError[] = [];
  const doc = raw as Partial<ConditionFile>;
  if (typeof doc !== "object" || doc === null) {
    return [{ field: "/", message: "not an object" }];
  }
  if (doc.version !== 1) errors.push({ field: "/version", message: "expected version 1" });
  if (typeof doc.n !== "number" || doc.n < 1) {
    errors.push({ field: "/n", message: "n must be a positive integer" });
  }
  if (!doc.skeleton || !Array.isArray(doc.skeleton.frames)) {
    errors.push({ field: "/skeleton", message: "missing skeleton frames" });
  } else if (typeof doc.n === "number" && doc.skeleton.frames.length !== doc.n) {
    errors.push({ field: "/skeleton/frames", message: `expected ${doc.n} frames` });
  }
  if (!doc.object_motion || !Array.isArray(doc.object_motion.frames)) {
    errors.push({ field: "/object_motion", message: "missing object motion" });
  } else if (typeof doc.n === "number" && doc.object_motion.frames.length !== doc.n) {
    errors.push({ field: "/object_motion/frames", message: `expected ${doc.n} frames` });
  }
  if (
    !Array.isArray(doc.object_paste_size) ||
    doc.object_paste_size.length !== 2 ||
    !(doc.object_paste_size[0] > 0 && doc.object_paste_size[1] > 0)
  ) {
    errors.push({ field: "/object_paste_size", message: "must be [w, h] with w, h > 0" });
  }
  return errors;
}
