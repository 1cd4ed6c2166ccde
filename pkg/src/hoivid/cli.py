"""Command-line entry points: train, infer, rasterize, curate, eval-invariants,
serve, and fixture generation.

Every subcommand honors --seed and --config (a JSON file of defaults);
explicit flags win over config values. Failures print a machine-readable
JSON object on stderr and exit 1; usage errors exit 2.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__


def _fail(kind: str, message: str, code: int = 1):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    sys.exit(code)


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SystemExit:
            raise
        except click.ClickException:
            raise
        except Exception as err:
            _fail(type(err).__name__, str(err))

    return wrapper


def _resolve(ctx, key, explicit, default):
    if explicit is not None:
        return explicit
    return ctx.obj["config"].get(key, default)


def _parse_res(value: str) -> tuple[int, int]:
    try:
        h, w = value.lower().split("x")
        return int(h), int(w)
    except ValueError as err:
        raise click.BadParameter(f"resolution must look like 64x64, got {value!r}") from err


@click.group()
@click.version_option(__version__)
@click.option("--seed", type=int, default=None, help="Global random seed.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON file with default option values.")
@click.pass_context
def main(ctx, seed, config_path):
    config = {}
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    if seed is not None:
        config["seed"] = seed
    config.setdefault("seed", 0)
    ctx.obj = {"config": config}


@main.command()
@click.option("--conditions", "conditions_path", required=True, type=click.Path(exists=True))
@click.option("--res", default=None, help="HxW, e.g. 64x64.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--what", type=click.Choice(["both", "pose", "object"]), default="both")
@click.pass_context
@_guard
def rasterize(ctx, conditions_path, res, out_dir, what):
    """Render a condition file to PNG frames."""
    from .conditions import (
        composite_motion_raster,
        load_condition_file,
        rasterize_object_motion,
        rasterize_pose,
    )
    from .io.frames import write_frames

    resolution = _parse_res(res or _resolve(ctx, "resolution", None, "64x64"))
    clip = load_condition_file(conditions_path)
    if what == "pose":
        frames = rasterize_pose(clip.skeleton, resolution)
    elif what == "object":
        frames = rasterize_object_motion(clip.object_motion, resolution)
    else:
        frames = composite_motion_raster(clip.skeleton, clip.object_motion, resolution)
    write_frames(frames, out_dir)
    click.echo(json.dumps({"frames": clip.n, "out": str(out_dir)}))


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--profile", type=click.Choice(["toy", "full"]), default="toy")
@click.option("--samples", "sample_count", type=int, default=None)
@click.option("--codec-steps", type=int, default=None)
@click.option("--no-augment", is_flag=True, default=False)
@click.pass_context
@_guard
def train(ctx, out_dir, profile, sample_count, codec_steps, no_augment):
    """Train the codec, then the three-stage diffusion schedule; saves a bundle."""
    import torch

    from .backbone import BackboneConfig
    from .codec import CodecConfig, VideoAutoencoder, fit_autoencoder
    from .model import ConditionedVideoModel, save_bundle
    from .training import StageSchedule, StageSpec, make_synthetic_set, run_schedule

    cfg_doc = ctx.obj["config"]
    seed = cfg_doc["seed"]
    sample_count = _resolve(ctx, "samples", sample_count, 8)
    codec_steps = _resolve(ctx, "codec_steps", codec_steps, 800)
    n_frames = cfg_doc.get("n_frames", 5)

    if "stages" in cfg_doc:
        schedule = StageSchedule(
            tuple(StageSpec(**{**stage, "resolution": tuple(stage["resolution"])})
                  for stage in cfg_doc["stages"])
        )
    else:
        schedule = StageSchedule.toy() if profile == "toy" else StageSchedule.full()

    model_config = BackboneConfig.from_json(cfg_doc["model"]) if "model" in cfg_doc else BackboneConfig()
    codec_config = CodecConfig(**cfg_doc.get("codec", {}))

    sample_cache = {}

    def make_samples(stage):
        key = stage.resolution
        if key not in sample_cache:
            sample_cache[key] = make_synthetic_set(
                count=sample_count, n_frames=n_frames,
                height=key[0], width=key[1], seed=seed, with_audio=True,
            )
        return sample_cache[key]

    torch.manual_seed(seed)
    codec = VideoAutoencoder(codec_config)
    first_res = schedule.stages[0].resolution
    clips = torch.from_numpy(
        np.stack([s.video for s in make_samples(schedule.stages[0])])
    )
    click.echo(f"training codec ({codec_steps} steps at {first_res[0]}x{first_res[1]})")
    fit_autoencoder(codec, clips, steps=codec_steps, seed=seed)

    torch.manual_seed(seed)
    model = ConditionedVideoModel(model_config)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = run_schedule(
        schedule, model, codec, make_samples,
        seed=seed, augment=not no_augment, log_path=out_dir / "loss_log.csv",
    )
    save_bundle(out_dir, model, codec)
    summary = {r.stage: {"steps": len(r.losses), "final_loss": r.losses[-1]} for r in results}
    click.echo(json.dumps({"out": str(out_dir), "stages": summary}))


@main.command()
@click.option("--conditions", "conditions_path", required=True, type=click.Path(exists=True))
@click.option("--human", "human_path", type=click.Path(exists=True), default=None)
@click.option("--object", "object_path", type=click.Path(exists=True), default=None)
@click.option("--audio", "audio_path", type=click.Path(exists=True), default=None)
@click.option("--steps", type=int, default=None)
@click.option("--seed", "seed_override", type=int, default=None)
@click.option("--segment-len", type=int, default=None, help="Latent frames per segment.")
@click.option("--overlap", type=int, default=2)
@click.option("--res", default=None)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--model-dir", type=click.Path(exists=True), default=None)
@click.pass_context
@_guard
def infer(ctx, conditions_path, human_path, object_path, audio_path, steps,
          seed_override, segment_len, overlap, res, out_dir, model_dir):
    """Sample a video from a condition file and reference images."""
    import os

    import torch
    from PIL import Image

    from .audio.features import load_audio_features
    from .conditions import load_condition_file
    from .conditions.files import attach_audio
    from .inference import SamplerConfig, long_video_sample, plan_segments, sample
    from .io.frames import to_float, write_frames
    from .model import ConditionEncoder, load_bundle
    from .service.app import MODEL_DIR_ENV

    model_dir = model_dir or os.environ.get(MODEL_DIR_ENV)
    if not model_dir:
        _fail("NoModel", "provide --model-dir or set HOMA_MODEL_DIR")
    model, codec, config = load_bundle(model_dir)

    resolution = _parse_res(res or _resolve(ctx, "resolution", None, "64x64"))
    steps = _resolve(ctx, "steps", steps, 50)
    seed = seed_override if seed_override is not None else ctx.obj["config"]["seed"]

    clip = load_condition_file(conditions_path)
    if audio_path:
        clip = attach_audio(clip, load_audio_features(audio_path, clip.n))

    def load_image(path):
        if path is None:
            return None
        img = Image.open(path).convert("RGB").resize(
            (resolution[1], resolution[0]), Image.BILINEAR
        )
        return to_float(np.asarray(img))

    encoder = ConditionEncoder(codec, config)
    inputs = encoder.encode_sample(
        clip, load_image(human_path), load_image(object_path), resolution
    )
    f, h, w = encoder.latent_geometry(clip.n, *resolution)
    shape = (1, f, h, w, config.latent_channels)
    cfg = SamplerConfig(steps=steps, seed=seed)
    with torch.no_grad():
        if segment_len is not None and f > segment_len:
            plan = plan_segments(f, segment_len, overlap)
            z_hat = long_video_sample(model, inputs, plan, shape, cfg)
        else:
            z_hat = sample(model, inputs, shape, cfg)
        video = codec.decode(z_hat)[0].numpy()
    write_frames(video, out_dir)
    click.echo(json.dumps({"frames": clip.n, "out": str(out_dir), "seed": seed}))


@main.command()
@click.option("--in", "in_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "manifest_path", required=True, type=click.Path())
@click.option("--tau", type=float, default=None)
@click.option("--workers", type=int, default=1)
@click.option("--sample-rate", type=int, default=None)
@click.option("--mode", type=click.Choice(["relative", "absolute"]), default="relative")
@click.pass_context
@_guard
def curate(ctx, in_dir, manifest_path, tau, workers, sample_rate, mode):
    """Depth-aware interaction filtering over clip directories."""
    from .curation import curate as run_curate, synthetic_backends

    tau = _resolve(ctx, "tau", tau, 0.15)
    sample_rate = _resolve(ctx, "sample_rate", sample_rate, 5)
    clip_dirs = sorted(p for p in Path(in_dir).iterdir() if p.is_dir())
    if not clip_dirs:
        _fail("NoClips", f"no clip directories under {in_dir}")
    records = run_curate(
        clip_dirs, synthetic_backends(), tau_rel=tau,
        sample_rate=sample_rate, manifest_path=manifest_path,
        workers=workers, mode=mode,
    )
    kept = sum(r.keep for r in records)
    click.echo(json.dumps({"clips": len(records), "kept": kept, "manifest": str(manifest_path)}))


@main.command("eval-invariants")
@click.pass_context
@_guard
def eval_invariants(ctx):
    """Run the masked-locality, rotary-position, and blend-weight suites."""
    from .invariants import run_all

    seed = ctx.obj["config"]["seed"]
    results = run_all(seed=seed)
    failed = [r for r in results if not r.passed]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        click.echo(f"[{status}] {r.name} ({r.cases} cases){': ' + r.detail if r.detail else ''}")
    if failed:
        _fail("InvariantFailure", "; ".join(f"{r.name}: {r.detail}" for r in failed))


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.option("--model-dir", type=click.Path(), default=None)
@click.option("--outputs", "output_root", type=click.Path(), default="outputs")
@click.option("--frontend", "frontend_dir", type=click.Path(), default=None)
@_guard
def serve(host, port, model_dir, output_root, frontend_dir):
    """Run the condition-editor HTTP service."""
    import uvicorn

    from .service import create_app

    app = create_app(model_dir=model_dir, output_root=output_root, frontend_dir=frontend_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command("make-fixtures")
@click.option("--kind", type=click.Choice(["depth", "conditions", "model", "overfit"]),
              required=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.pass_context
@_guard
def make_fixtures(ctx, kind, out_dir):
    """Generate fixture assets: depth clips, demo conditions, or model bundles."""
    seed = ctx.obj["config"]["seed"]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if kind == "depth":
        from .curation import make_depth_fixture

        clips = make_depth_fixture(out_dir, seed=seed)
        click.echo(json.dumps({"clips": [str(d) for d, _ in clips]}))
        return

    if kind == "conditions":
        from .conditions import save_condition_file
        from .io.frames import write_image
        from .training import make_synthetic_sample

        sample = make_synthetic_sample(seed, n_frames=5, height=64, width=64, with_audio=False)
        save_condition_file(sample.conditions, out_dir / "conditions.json")
        write_image(sample.human_image, out_dir / "human.png")
        write_image(sample.object_image, out_dir / "object.png")
        click.echo(json.dumps({"conditions": str(out_dir / "conditions.json")}))
        return

    import torch

    from .backbone import BackboneConfig
    from .codec import CodecConfig, VideoAutoencoder
    from .model import ConditionedVideoModel, save_bundle

    if kind == "model":
        # Random-initialized bundle: enough for service smoke tests and the
        # editor's end-to-end loop, no training time.
        torch.manual_seed(seed)
        codec = VideoAutoencoder(CodecConfig(latent_channels=8, base_channels=16))
        model = ConditionedVideoModel(BackboneConfig())
        save_bundle(out_dir, model, codec)
        click.echo(json.dumps({"bundle": str(out_dir), "trained": False}))
        return

    from .training.fixture import train_overfit_fixture

    bundle = train_overfit_fixture(out_dir, seed=seed)
    click.echo(json.dumps({"bundle": str(out_dir), "trained": True, **bundle.metrics}))


if __name__ == "__main__":
    main()
