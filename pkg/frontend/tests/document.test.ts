import { describe, expect, it } from "vitest";

import {
  dragEdit,
  exportConditions,
  importConditions,
  newDocument,
  redo,
  resizeObjectBox,
  setText,
  togglePart,
  undo,
  validateShape,
} from "../src/document.js";
import { ConditionFile, MotionEncoding } from "../src/types.js";

// Deterministic PRNG for fixture documents.
function mulberry32(seed: number) {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function fixtureDocument(seed: number) {
  const rand = mulberry32(seed);
  const encodings: MotionEncoding[] = ["dot", "bbox", "gaussian_dot"];
  const n = 3 + Math.floor(rand() * 6);
  let doc = newDocument(n, encodings[seed % 3]);
  for (let k = 0; k < 4; k++) {
    const frame = Math.floor(rand() * n);
    doc = dragEdit(doc, { kind: "object_dot" }, frame, rand(), rand());
    doc = dragEdit(doc, { kind: "joint", jointId: "right_wrist" }, frame, rand(), rand());
  }
  doc = resizeObjectBox(doc, { cx: rand(), cy: rand(), w: 0.05 + rand() * 0.4, h: 0.05 + rand() * 0.4 });
  if (rand() < 0.5) doc = setText(doc, `prompt ${seed}`);
  return doc;
}

describe("export/import round trip", () => {
  it("is the identity on 20 fixture documents", () => {
    for (let seed = 0; seed < 20; seed++) {
      const doc = fixtureDocument(seed);
      const exported = exportConditions(doc);
      const reimported = importConditions(JSON.parse(JSON.stringify(exported)));
      expect(exportConditions(reimported)).toEqual(exported);
    }
  });

  it("rejects malformed documents", () => {
    expect(validateShape({})).not.toHaveLength(0);
    expect(validateShape({ version: 1, n: -2 })).not.toHaveLength(0);
    const good = exportConditions(newDocument(5));
    expect(validateShape(good)).toHaveLength(0);
    const bad = { ...good, object_paste_size: [0, 0] as [number, number] };
    expect(validateShape(bad).map((e) => e.field)).toContain("/object_paste_size");
  });

  it("accepts files without the optional face_boxes key", () => {
    const exported = exportConditions(newDocument(3)) as Partial<ConditionFile>;
    delete exported.face_boxes;
    const doc = importConditions(exported);
    expect(doc.conditions.face_boxes).toBeNull();
  });
});

describe("drag editing", () => {
  it("moves the object dot and marks the keyframe", () => {
    let doc = newDocument(5);
    doc = dragEdit(doc, { kind: "object_dot" }, 2, 0.5, 0.5);
    expect(doc.conditions.object_motion.frames[2].cx).toBe(0.5);
    expect(doc.conditions.object_motion.frames[2].cy).toBe(0.5);
    expect(doc.keyframes).toContain(2);
    expect(doc.selectedFrame).toBe(2);
  });

  it("clamps drags outside the canvas to [0,1]^2", () => {
    let doc = newDocument(5);
    doc = dragEdit(doc, { kind: "object_dot" }, 0, -0.4, 1.7);
    expect(doc.conditions.object_motion.frames[0].cx).toBe(0);
    expect(doc.conditions.object_motion.frames[0].cy).toBe(1);
    doc = dragEdit(doc, { kind: "joint", jointId: "right_wrist" }, 0, 2.0, -1.0);
    const wrist = doc.conditions.skeleton.frames[0].joints.find((j) => j.id === "right_wrist")!;
    expect(wrist.x).toBe(1);
    expect(wrist.y).toBe(0);
  });

  it("rejects out-of-range frames and foreign joints", () => {
    const doc = newDocument(3);
    expect(() => dragEdit(doc, { kind: "object_dot" }, 9, 0.5, 0.5)).toThrow();
    expect(() => dragEdit(doc, { kind: "joint", jointId: "left_knee" }, 0, 0.5, 0.5)).toThrow();
  });
});

describe("undo/redo", () => {
  it("undo restores the exact pre-drag state", () => {
    const base = newDocument(5);
    const before = JSON.stringify({ c: base.conditions, k: base.keyframes });
    const dragged = dragEdit(base, { kind: "object_dot" }, 1, 0.9, 0.9);
    const undone = undo(dragged);
    expect(JSON.stringify({ c: undone.conditions, k: undone.keyframes })).toBe(before);
  });

  it("redo restores the exact post-drag state", () => {
    const base = newDocument(5);
    const dragged = dragEdit(base, { kind: "object_dot" }, 1, 0.9, 0.9);
    const after = JSON.stringify({ c: dragged.conditions, k: dragged.keyframes });
    const roundtrip = redo(undo(dragged));
    expect(JSON.stringify({ c: roundtrip.conditions, k: roundtrip.keyframes })).toBe(after);
  });

  it("undo on an empty stack is a no-op", () => {
    const doc = newDocument(3);
    expect(undo(doc)).toBe(doc);
  });
});

describe("object box resizing", () => {
  it("a quarter-canvas box sets object_paste_size to [0.25, 0.25]", () => {
    const doc = resizeObjectBox(newDocument(5), { cx: 0.5, cy: 0.5, w: 0.25, h: 0.25 });
    expect(doc.conditions.object_paste_size).toEqual([0.25, 0.25]);
  });

  it("rejects zero-area boxes", () => {
    expect(() => resizeObjectBox(newDocument(5), { cx: 0.5, cy: 0.5, w: 0, h: 0.2 })).toThrow();
  });
});

describe("part toggles", () => {
  it("removing a part drops its joints from every frame", () => {
    let doc = newDocument(4);
    doc = togglePart(doc, "torso"); // add
    doc = dragEdit(doc, { kind: "joint", jointId: "left_hip" }, 0, 0.4, 0.6);
    doc = togglePart(doc, "torso"); // remove again
    for (const frame of doc.conditions.skeleton.frames) {
      expect(frame.joints.some((j) => j.id === "left_hip")).toBe(false);
    }
    // Shoulders are shared with arms and must survive.
    expect(doc.conditions.skeleton.retained_parts).toEqual(["arms"]);
  });

  it("keeps at least one retained part", () => {
    const doc = newDocument(4);
    expect(() => togglePart(doc, "arms")).toThrow();
  });
});
