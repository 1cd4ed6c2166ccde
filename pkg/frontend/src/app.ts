// DOM layer: canvas editing, timeline, previews, and job polling.
// All geometry is normalized [0,1]^2; pixels are view-only.

import { ServiceClient, ValidationError } from "./client.js";
import {
  DragTarget,
  EditorDocument,
  applyServerConditions,
  dragEdit,
  exportConditions,
  importConditions,
  newDocument,
  redo,
  resizeObjectBox,
  setSelectedFrame,
  setText,
  togglePart,
  undo,
} from "./document.js";
import { parseKeypointCsv } from "./csv.js";
import { ALL_PARTS, BONES, BodyPartLabel } from "./types.js";

const client = new ServiceClient("");
let doc: EditorDocument = newDocument(5);
let dragging: DragTarget | null = null;
let resizingBox = false;

const canvas = document.getElementById("editor-canvas") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const frameSlider = document.getElementById("frame-slider") as HTMLInputElement;
const frameLabel = document.getElementById("frame-label")!;
const statusLine = document.getElementById("status-line")!;
const partsBox = document.getElementById("parts")!;
const previewStrip = document.getElementById("preview-strip")!;
const resultStrip = document.getElementById("result-strip")!;
const textInput = document.getElementById("text-input") as HTMLInputElement;
const seedInput = document.getElementById("seed-input") as HTMLInputElement;
const stepsInput = document.getElementById("steps-input") as HTMLInputElement;
const humanInput = document.getElementById("human-image") as HTMLInputElement;
const objectInput = document.getElementById("object-image") as HTMLInputElement;

function setDoc(next: EditorDocument) {
  doc = next;
  render();
}

function toCanvas(x: number, y: number): [number, number] {
  return [x * canvas.width, y * canvas.height];
}

function fromEvent(ev: MouseEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  return [(ev.clientX - rect.left) / rect.width, (ev.clientY - rect.top) / rect.height];
}

function currentJoints() {
  return doc.conditions.skeleton.frames[doc.selectedFrame].joints.filter((j) => j.present);
}

function currentDot(): [number, number] {
  const frame = doc.conditions.object_motion.frames[doc.selectedFrame];
  return [frame.cx, frame.cy];
}

function pasteBox() {
  const [w, h] = doc.conditions.object_paste_size;
  const [cx, cy] = [doc.conditions.object_motion.frames[0].cx, doc.conditions.object_motion.frames[0].cy];
  return { cx, cy, w, h };
}

function render() {
  ctx.fillStyle = "#101014";
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  const joints = new Map(currentJoints().map((j) => [j.id, j]));
  ctx.strokeStyle = "#3ddc84";
  ctx.lineWidth = 3;
  for (const [a, b] of BONES) {
    const ja = joints.get(a);
    const jb = joints.get(b);
    if (!ja || !jb) continue;
    ctx.beginPath();
    ctx.moveTo(...toCanvas(ja.x, ja.y));
    ctx.lineTo(...toCanvas(jb.x, jb.y));
    ctx.stroke();
  }
  for (const joint of joints.values()) {
    const [x, y] = toCanvas(joint.x, joint.y);
    ctx.fillStyle = "#9be8c0";
    ctx.beginPath();
    ctx.arc(x, y, 5, 0, Math.PI * 2);
    ctx.fill();
  }

  if (doc.selectedFrame === 0) {
    const box = pasteBox();
    const [bx, by] = toCanvas(box.cx - box.w / 2, box.cy - box.h / 2);
    const [bw, bh] = [box.w * canvas.width, box.h * canvas.height];
    ctx.strokeStyle = "#888";
    ctx.setLineDash([6, 4]);
    ctx.strokeRect(bx, by, bw, bh);
    ctx.setLineDash([]);
    ctx.fillStyle = "#ccc";
    ctx.fillRect(bx + bw - 5, by + bh - 5, 10, 10); // resize handle
  }

  const [dx, dy] = toCanvas(...currentDot());
  ctx.fillStyle = "#ffffff";
  ctx.beginPath();
  ctx.arc(dx, dy, 7, 0, Math.PI * 2);
  ctx.fill();

  frameSlider.max = String(doc.conditions.n - 1);
  frameSlider.value = String(doc.selectedFrame);
  const mark = doc.keyframes.includes(doc.selectedFrame) ? " (keyframe)" : "";
  frameLabel.textContent = `frame ${doc.selectedFrame + 1}/${doc.conditions.n}${mark}`;
  textInput.value = doc.conditions.text ?? "";

  partsBox.querySelectorAll("input").forEach((el) => {
    const input = el as HTMLInputElement;
    input.checked = doc.conditions.skeleton.retained_parts.includes(
      input.dataset.part as BodyPartLabel
    );
  });
}

function status(message: string, isError = false) {
  statusLine.textContent = message;
  statusLine.className = isError ? "error" : "";
}

function hitTest(x: number, y: number): DragTarget | "box-handle" | null {
  const tol = 12 / canvas.width;
  if (doc.selectedFrame === 0) {
    const box = pasteBox();
    const hx = box.cx + box.w / 2;
    const hy = box.cy + box.h / 2;
    if (Math.abs(x - hx) < tol && Math.abs(y - hy) < tol) return "box-handle";
  }
  const [dotX, dotY] = currentDot();
  if (Math.hypot(x - dotX, y - dotY) < tol) return { kind: "object_dot" };
  for (const joint of currentJoints()) {
    if (Math.hypot(x - joint.x, y - joint.y) < tol) {
      return { kind: "joint", jointId: joint.id };
    }
  }
  return null;
}

canvas.addEventListener("mousedown", (ev) => {
  const [x, y] = fromEvent(ev);
  const hit = hitTest(x, y);
  if (hit === "box-handle") {
    resizingBox = true;
  } else if (hit) {
    dragging = hit;
  }
});

canvas.addEventListener("mousemove", (ev) => {
  if (!dragging && !resizingBox) return;
  const [x, y] = fromEvent(ev);
  if (resizingBox) {
    const box = pasteBox();
    const w = Math.max(0.02, (x - box.cx) * 2);
    const h = Math.max(0.02, (y - box.cy) * 2);
    setDoc(resizeObjectBox(doc, { ...box, w, h }));
  } else if (dragging) {
    setDoc(dragEdit(doc, dragging, doc.selectedFrame, x, y));
  }
});

window.addEventListener("mouseup", () => {
  dragging = null;
  resizingBox = false;
});

frameSlider.addEventListener("input", () => {
  setDoc(setSelectedFrame(doc, Number(frameSlider.value)));
});

for (const part of ALL_PARTS) {
  const label = document.createElement("label");
  const input = document.createElement("input");
  input.type = "checkbox";
  input.dataset.part = part;
  input.addEventListener("change", () => {
    try {
      setDoc(togglePart(doc, part));
    } catch (err) {
      status(String(err), true);
      render();
    }
  });
  label.appendChild(input);
  label.appendChild(document.createTextNode(part));
  partsBox.appendChild(label);
}

textInput.addEventListener("change", () => setDoc(setText(doc, textInput.value)));

document.getElementById("undo-btn")!.addEventListener("click", () => setDoc(undo(doc)));
document.getElementById("redo-btn")!.addEventListener("click", () => setDoc(redo(doc)));

document.getElementById("interpolate-btn")!.addEventListener("click", async () => {
  try {
    const conditions = await client.interpolate(exportConditions(doc), doc.keyframes);
    setDoc(applyServerConditions(doc, conditions));
    status("interpolated between keyframes");
  } catch (err) {
    status(err instanceof ValidationError ? err.message : String(err), true);
  }
});

document.getElementById("preview-btn")!.addEventListener("click", async () => {
  try {
    const preview = await client.rasterize(exportConditions(doc), [64, 64]);
    previewStrip.innerHTML = "";
    for (const b64 of preview.frames) {
      const img = document.createElement("img");
      img.src = `data:image/png;base64,${b64}`;
      previewStrip.appendChild(img);
    }
    status(`rasterized ${preview.n} preview frames`);
  } catch (err) {
    status(err instanceof ValidationError ? err.message : String(err), true);
  }
});

function fileToB64(input: HTMLInputElement): Promise<string | undefined> {
  const file = input.files?.[0];
  if (!file) return Promise.resolve(undefined);
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onload = () => resolve(String(reader.result).split(",")[1]);
    reader.onerror = reject;
    reader.readAsDataURL(file);
  });
}

document.getElementById("generate-btn")!.addEventListener("click", async () => {
  try {
    await client.validate(exportConditions(doc));
    const [human, object] = await Promise.all([fileToB64(humanInput), fileToB64(objectInput)]);
    const job = await client.submitInfer({
      conditions: exportConditions(doc),
      human_image: human,
      object_image: object,
      seed: Number(seedInput.value) || 0,
      steps: Number(stepsInput.value) || 50,
      resolution: [64, 64],
    });
    status(`job ${job.job_id} queued`);
    const done = await client.waitForJob(job.job_id);
    if (done.status === "failed") {
      status(`job failed: ${done.error}`, true);
      return;
    }
    resultStrip.innerHTML = "";
    for (const url of done.frames ?? []) {
      const img = document.createElement("img");
      img.src = url;
      resultStrip.appendChild(img);
    }
    status(`job ${job.job_id} done (${done.n} frames)`);
  } catch (err) {
    status(err instanceof ValidationError ? err.message : String(err), true);
  }
});

document.getElementById("export-btn")!.addEventListener("click", () => {
  const blob = new Blob([JSON.stringify(exportConditions(doc), null, 2)], {
    type: "application/json",
  });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "conditions.json";
  a.click();
  URL.revokeObjectURL(a.href);
});

const importInput = document.getElementById("import-file") as HTMLInputElement;
importInput.addEventListener("change", async () => {
  const file = importInput.files?.[0];
  if (!file) return;
  const text = await file.text();
  try {
    setDoc(file.name.endsWith(".csv") ? parseKeypointCsv(text) : importConditions(JSON.parse(text)));
    status(`imported ${file.name}`);
  } catch (err) {
    status(String(err), true);
  }
});

document.getElementById("new-btn")!.addEventListener("click", () => {
  const n = Number(prompt("frame count (4k+1, e.g. 5)", "5")) || 5;
  setDoc(newDocument(n));
});

render();
status("ready");
