// Bare keypoint CSV import: "frame,joint_id,x,y" rows, header optional.
// Rows outside [0,1]^2 are clamped like drags; frame count is inferred from
// the largest frame index.

import { EditorDocument, newDocument } from "./document.js";
import { clamp01 } from "./types.js";

export function parseKeypointCsv(text: string): EditorDocument {
  const rows: { frame: number; joint: string; x: number; y: number }[] = [];
  for (const rawLine of text.split(/\r?\n/)) {
    const line = rawLine.trim();
    if (!line) continue;
    const cells = line.split(",").map((c) => c.trim());
    if (cells.length !== 4) throw new Error(`expected 4 columns, got: ${line}`);
    if (cells[0].toLowerCase() === "frame") continue; // header
    const frame = Number(cells[0]);
    const x = Number(cells[2]);
    const y = Number(cells[3]);
    if (!Number.isInteger(frame) || frame < 0) throw new Error(`bad frame index: ${line}`);
    if (!Number.isFinite(x) || !Number.isFinite(y)) throw new Error(`bad coordinates: ${line}`);
    rows.push({ frame, joint: cells[1], x, y });
  }
  if (!rows.length) throw new Error("empty keypoint CSV");
  const n = Math.max(...rows.map((r) => r.frame)) + 1;
  const doc = newDocument(n);
  for (const frame of doc.conditions.skeleton.frames) frame.joints = [];
  doc.conditions.skeleton.retained_parts = ["arms", "hands/fingers", "torso", "legs", "head"];
  for (const row of rows) {
    doc.conditions.skeleton.frames[row.frame].joints.push({
      id: row.joint,
      x: clamp01(row.x),
      y: clamp01(row.y),
      present: true,
    });
  }
  return doc;
}
