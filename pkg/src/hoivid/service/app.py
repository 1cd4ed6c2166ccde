"""HTTP API backing the condition editor.

Thin by construction: every endpoint is a composition of core operations
(validation, interpolation, rasterization, sampling); no business logic
lives here. Output frames are written as PNG directories and served
statically under /outputs.
"""

from __future__ import annotations

import base64
import hashlib
import io as _io
import json
import os
from pathlib import Path

import numpy as np
import torch
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from PIL import Image

from ..audio.features import load_feature_file
from ..conditions import (
    composite_motion_raster,
    condition_from_json,
    condition_to_json,
    interpolate_keyframes,
    rasterize_object_motion,
    rasterize_pose,
    validate_condition_json,
)
from ..conditions.files import attach_audio
from ..inference import SamplerConfig, long_video_sample, plan_segments, sample
from ..io.frames import to_float, to_uint8, write_frames
from ..model import ConditionEncoder, load_bundle
from .jobs import JobQueue, JobStore

MODEL_DIR_ENV = "HOMA_MODEL_DIR"


def _png_b64(frame: np.ndarray) -> str:
    buf = _io.BytesIO()
    Image.fromarray(frame, mode="RGB").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _decode_image(b64: str, size: tuple[int, int]) -> np.ndarray:
    img = Image.open(_io.BytesIO(base64.b64decode(b64))).convert("RGB")
    img = img.resize((size[1], size[0]), Image.BILINEAR)
    return to_float(np.asarray(img))


def _validation_response(doc) -> list[dict]:
    return [{"path": path, "message": message} for path, message in validate_condition_json(doc)]


def create_app(
    model_dir: str | Path | None = None,
    output_root: str | Path | None = None,
    frontend_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="hoivid condition service")
    store = JobStore()
    queue = JobQueue(store)
    output_root = Path(output_root or "outputs")
    output_root.mkdir(parents=True, exist_ok=True)
    app.mount("/outputs", StaticFiles(directory=output_root), name="outputs")
    if frontend_dir is not None and Path(frontend_dir).exists():
        app.mount("/app", StaticFiles(directory=frontend_dir, html=True), name="app")

    bundle = {"loaded": False, "model": None, "codec": None, "config": None}

    def get_bundle():
        if not bundle["loaded"]:
            directory = model_dir or os.environ.get(MODEL_DIR_ENV)
            if not directory or not Path(directory).exists():
                raise HTTPException(503, detail="no model bundle available; set HOMA_MODEL_DIR")
            model, codec, config = load_bundle(directory)
            bundle.update(loaded=True, model=model, codec=codec, config=config)
        return bundle["model"], bundle["codec"], bundle["config"]

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/conditions/validate")
    async def validate(request: Request):
        doc = await request.json()
        errors = _validation_response(doc)
        if errors:
            return JSONResponse(status_code=422, content={"detail": errors})
        return {"valid": True, "n": doc["n"]}

    @app.post("/conditions/interpolate")
    async def interpolate(request: Request):
        body = await request.json()
        doc = body.get("conditions")
        errors = _validation_response(doc)
        if errors:
            return JSONResponse(status_code=422, content={"detail": errors})
        indices = body.get("edited_frame_indices")
        try:
            clip = interpolate_keyframes(condition_from_json(doc), indices)
        except Exception as err:
            return JSONResponse(
                status_code=422,
                content={"detail": [{"path": "/edited_frame_indices", "message": str(err)}]},
            )
        return {"conditions": condition_to_json(clip)}

    @app.post("/rasterize")
    async def rasterize(request: Request):
        body = await request.json()
        doc = body.get("conditions")
        errors = _validation_response(doc)
        if errors:
            return JSONResponse(status_code=422, content={"detail": errors})
        height, width = body.get("resolution", [64, 64])
        clip = condition_from_json(doc)
        what = body.get("what", "both")
        if what == "pose":
            frames = rasterize_pose(clip.skeleton, (height, width))
        elif what == "object":
            frames = rasterize_object_motion(clip.object_motion, (height, width))
        else:
            frames = composite_motion_raster(clip.skeleton, clip.object_motion, (height, width))
        return {"n": clip.n, "frames": [_png_b64(f) for f in frames]}

    @app.post("/jobs/infer")
    async def submit_infer(request: Request):
        body = await request.json()
        doc = body.get("conditions")
        errors = _validation_response(doc)
        if errors:
            return JSONResponse(status_code=422, content={"detail": errors})
        model, codec, config = get_bundle()
        clip = condition_from_json(doc)
        height, width = body.get("resolution", [64, 64])
        steps = int(body.get("steps", 50))
        seed = int(body.get("seed", 0))
        segment_len = body.get("segment_len")
        overlap = int(body.get("overlap", 2))
        if body.get("audio_features") is not None:
            clip = attach_audio(clip, np.asarray(body["audio_features"], dtype=np.float32))
        elif clip.audio_path and Path(clip.audio_path).suffix == ".json":
            clip = attach_audio(clip, load_feature_file(clip.audio_path))
        human = (
            _decode_image(body["human_image"], (height, width))
            if body.get("human_image")
            else None
        )
        obj = (
            _decode_image(body["object_image"], (height, width))
            if body.get("object_image")
            else None
        )
        input_hash = hashlib.sha256(
            json.dumps(body, sort_keys=True).encode("utf-8")
        ).hexdigest()[:16]

        def run():
            encoder = ConditionEncoder(codec, config)
            inputs = encoder.encode_sample(clip, human, obj, (height, width))
            f, h, w = encoder.latent_geometry(clip.n, height, width)
            shape = (1, f, h, w, config.latent_channels)
            cfg = SamplerConfig(steps=steps, seed=seed)
            with torch.no_grad():
                if segment_len is not None and f > int(segment_len):
                    plan = plan_segments(f, int(segment_len), overlap)
                    z_hat = long_video_sample(model, inputs, plan, shape, cfg)
                else:
                    z_hat = sample(model, inputs, shape, cfg)
                video = codec.decode(z_hat)[0].numpy()
            out_dir = output_root / record.job_id
            write_frames(to_uint8(video), out_dir)
            urls = [f"/outputs/{record.job_id}/{i:05d}.png" for i in range(clip.n)]
            return {"output_path": str(out_dir), "frames": urls, "n": clip.n}

        record = queue.submit("infer", run, input_hash=input_hash)
        return JSONResponse(status_code=202, content=record.to_json())

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        record = store.get(job_id)
        if record is None:
            raise HTTPException(404, detail=f"unknown job {job_id!r}")
        return record.to_json()

    app.state.job_queue = queue
    app.state.job_store = store
    app.state.output_root = output_root
    return app
