"""Acceptance suite: every criterion at its stated tolerance, one printed
pass/fail line per criterion.

The overfit fixture (codec + 500-step conditioned training on the 8-clip
synthetic set) is trained once per session and shared; everything else runs
in seconds.
"""

import copy
import time
from dataclasses import replace

import numpy as np
import pytest
import torch

from hoivid.backbone import BackboneConfig, VideoBackbone, rope_phases
from hoivid.codec import latent_frames
from hoivid.conditions import (
    ConditionClip,
    MotionEncoding,
    ObjectMotion,
    interpolate_keyframes,
    rasterize_object_motion,
    rasterize_pose,
)
from hoivid.fusion import channel_concat_appearance, split_channel_concat, token_temporal_concat
from hoivid.inference import SamplerConfig, blend_segments, plan_segments, sample
from hoivid.invariants import run_blend_weight_suite, run_masked_locality_suite, run_rope_suite
from hoivid.model import ConditionEncoder, ConditionedVideoModel
from hoivid.training import flow_match_loss, run_stage
from hoivid.training.fixture import train_overfit_fixture
from hoivid.training.stages import StageSpec

from .conftest import TINY_MODEL_CONFIG
from .test_conditions import make_clip


def report(name: str, passed: bool, detail: str = ""):
    line = f"[{'PASS' if passed else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
    print(line)
    assert passed, line


@pytest.fixture(scope="module")
def overfit():
    t0 = time.time()
    fixture = train_overfit_fixture(seed=0)
    fixture.metrics["train_seconds"] = time.time() - t0
    return fixture


class TestMaskedLocalitySuite:
    def test_masked_locality(self):
        t0 = time.time()
        result = run_masked_locality_suite(trials=100, seed=0)
        elapsed = time.time() - t0
        report(
            "masked-locality",
            result.passed and elapsed < 60.0,
            f"{result.cases} random cases in {elapsed:.1f}s {result.detail}",
        )


class TestInitializationTransparency:
    def test_adapted_equals_unadapted_forward(self, tiny_codec, tiny_inputs_factory, tiny_samples):
        torch.manual_seed(0)
        adapted = ConditionedVideoModel(TINY_MODEL_CONFIG)  # zero-init new projections
        plain = ConditionedVideoModel(TINY_MODEL_CONFIG.with_ablation(adapter_variant="none"))
        plain.load_state_dict(
            {k: v for k, v in adapted.state_dict().items() if not k.startswith("hoi_adapters")},
            strict=True,
        )
        inputs = tiny_inputs_factory(TINY_MODEL_CONFIG, tiny_samples[0])
        g = torch.Generator().manual_seed(1)
        worst = 0.0
        for _ in range(5):
            z_t = torch.randn(1, 2, 4, 4, 4, generator=g)
            t = float(torch.rand((), generator=g))
            diff = (adapted(z_t, t, inputs) - plain(z_t, t, inputs)).abs().max().item()
            worst = max(worst, diff)
        report("init-transparency/forward", worst <= 1e-6, f"max |diff| {worst:.2e}")

    def test_adapter_weights_equal_sources_at_attach(self):
        from hoivid.adapters import attach_adapters

        torch.manual_seed(0)
        backbone = VideoBackbone(TINY_MODEL_CONFIG)
        stack = attach_adapters(backbone, zero_init_output=False)
        host = dict(backbone.named_parameters())
        params = dict(stack.named_parameters())
        mismatches = [
            name for name, source in stack.sources.items()
            if not torch.equal(params[name], host[source])
        ]
        # qkv weights stay cloned in the default (zero output) mode too.
        default_stack = attach_adapters(backbone)
        qkv_ok = all(
            torch.equal(default_stack.layer(i).qkv_video.weight, backbone.blocks[i].img_attn.qkv.weight)
            for i in default_stack.layer_indices
        )
        report(
            "init-transparency/weights",
            not mismatches and qkv_ok,
            f"{len(stack.sources)} cloned tensors checked",
        )


class TestShapeFusionSuite:
    def test_channel_concat_3c(self):
        cases = [(1, 1, 2, 2, 2), (2, 3, 4, 6, 8), (1, 2, 8, 8, 4), (3, 1, 4, 4, 16)]
        ok = True
        for b, f, h, w, c in cases:
            z = torch.randn(b, f, h, w, c)
            out = channel_concat_appearance(z, torch.randn_like(z), torch.randn_like(z))
            ok = ok and out.shape == (b, f, h, w, 3 * c)
        report("shape-fusion/3c", ok, f"{len(cases)} shape families")

    def test_token_concat_and_rope_offsets(self):
        from hoivid.codec import PatchEmbed

        embed = PatchEmbed(4, 2, 32)
        grid = embed(torch.randn(1, 2, 8, 8, 4))
        obj = embed(torch.randn(1, 1, 8, 8, 4))
        out = token_temporal_concat(grid, obj)
        added_one_frame = out.num_tokens == grid.num_tokens + 16
        minus_one = bool((out.frame_ids[:16] == -1).all())

        model = ConditionedVideoModel(TINY_MODEL_CONFIG)
        phases = model.adapter_object_phases(2, 2)
        from hoivid.codec.patchify import build_token_indices

        _, rows, cols = build_token_indices(1, 2, 2)
        expected = rope_phases(torch.full((4,), -2), rows, cols, model.config.d_head,
                               model.config.rope_theta)
        minus_two = torch.equal(phases, expected)
        report(
            "shape-fusion/token-concat",
            added_one_frame and minus_one and minus_two,
            "one prepended frame at -1; adapter object tokens at -2",
        )

    def test_deconcat_lossless(self):
        parts = [torch.randn(2, 3, 4, 4, 5) for _ in range(3)]
        back = split_channel_concat(channel_concat_appearance(*parts))
        lossless = all(torch.equal(a, b) for a, b in zip(parts, back))
        obj_grid_losses = True
        from hoivid.codec import PatchEmbed

        embed = PatchEmbed(4, 2, 16)
        grid = embed(torch.randn(1, 2, 8, 8, 4))
        obj = embed(torch.randn(1, 1, 8, 8, 4))
        out = token_temporal_concat(grid, obj)
        obj_grid_losses = torch.equal(out.tokens[:, :16], obj.tokens) and torch.equal(
            out.tokens[:, 16:], grid.tokens
        )
        report("shape-fusion/lossless", lossless and obj_grid_losses)


class TestGradientSuite:
    def test_flow_loss_gradients_match_finite_differences(
        self, tiny_codec, tiny_inputs_factory, tiny_samples
    ):
        # d_model=32, 2 layers, 8 video tokens, float64, every parameter
        # tensor with sampled coordinates.
        t0 = time.time()
        torch.manual_seed(0)
        model = ConditionedVideoModel(TINY_MODEL_CONFIG).double()
        with torch.no_grad():  # live output head so every path carries signal
            model.backbone.final.proj.weight.normal_(std=0.05)
            for p in model.hoi_adapters.parameters():
                p.normal_(std=0.05)
        inputs = tiny_inputs_factory(TINY_MODEL_CONFIG, tiny_samples[0]).astype(torch.float64)
        g = torch.Generator().manual_seed(1)
        z0 = torch.randn(1, 2, 4, 4, 4, generator=g, dtype=torch.float64)
        noise = torch.randn(1, 2, 4, 4, 4, generator=g, dtype=torch.float64)
        t = torch.tensor([0.37], dtype=torch.float64)

        def loss_value():
            return flow_match_loss(model, z0, inputs, t, noise)

        model.zero_grad()
        loss_value().backward()

        rng = np.random.default_rng(0)
        checked = 0
        worst = 0.0
        worst_name = ""
        for name, param in model.named_parameters():
            grad = param.grad if param.grad is not None else torch.zeros_like(param)
            flat = param.data.view(-1)
            gflat = grad.view(-1)
            coords = rng.choice(flat.numel(), size=min(4, flat.numel()), replace=False)
            for idx in coords:
                idx = int(idx)
                analytic = float(gflat[idx])
                h = 1e-6 * max(1.0, abs(float(flat[idx])))
                with torch.no_grad():
                    flat[idx] += h
                    up = float(loss_value())
                    flat[idx] -= 2 * h
                    down = float(loss_value())
                    flat[idx] += h
                numeric = (up - down) / (2 * h)
                rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)
                if rel > worst:
                    worst, worst_name = rel, f"{name}[{idx}]"
                checked += 1
        elapsed = time.time() - t0
        report(
            "gradient-suite",
            worst <= 1e-3 and elapsed < 300.0,
            f"{checked} coordinates, worst rel err {worst:.2e} at {worst_name}, {elapsed:.0f}s",
        )


class TestOverfitFixture:
    def test_loss_reduction_and_sampling_mae(self, overfit):
        m = overfit.metrics
        ok = m["loss_ratio"] <= 0.10 and m["sample_mae"] <= 0.10 and m["train_seconds"] <= 1800
        report(
            "overfit-fixture",
            ok,
            f"loss {m['initial_loss']:.3f}->{m['final_loss']:.3f} "
            f"(ratio {m['loss_ratio']:.3f} <= 0.10), sampling MAE {m['sample_mae']:.4f} <= 0.1, "
            f"{m['train_seconds']:.0f}s",
        )


class TestLongVideoFusionOracle:
    def test_blend_oracle(self):
        plan = plan_segments(10, 6, 2)
        seg_a = torch.full((1, 6, 2, 2, 1), 1.0, dtype=torch.float64)
        seg_b = torch.full((1, 6, 2, 2, 1), 3.0, dtype=torch.float64)
        fused = blend_segments([seg_a, seg_b], plan)
        # Independent convex-combination oracle from the weight table.
        ok = True
        for g in (4, 5):
            w = plan.weights[0, g]
            expected = w * 1.0 + (1.0 - w) * 3.0
            ok = ok and bool((fused[:, g] - expected).abs().max() <= 1e-7)
        table_ok = plan.weights[0, 4] == pytest.approx(2 / 3) and plan.weights[0, 5] == pytest.approx(1 / 3)
        sums_exact = bool((plan.frame_weight_sums() == 1.0).all())
        non_overlap = torch.equal(fused[:, :4], seg_a[:, :4]) and torch.equal(fused[:, 6:], seg_b[:, 2:])
        weights_suite = run_blend_weight_suite(trials=100, seed=0)
        report(
            "long-video-fusion",
            ok and table_ok and sums_exact and non_overlap and weights_suite.passed,
            "overlap blend within 1e-7, exact unit weight sums, non-overlap bit-identical",
        )


ABLATION_FLAGS = [
    {"object_motion_encoding": "bbox"},
    {"object_motion_encoding": "gaussian_dot"},
    {"use_token_concat": False},
    {"use_channel_paste": False},
    {"fix_copy": True},
    {"single_motion_encoder": True},
    {"adapter_variant": "none"},
    {"adapter_variant": "cross_attn"},
]

ABLATION_CONFIG = BackboneConfig(
    d_model=64, n_heads=2, n_layers=4, patch_size=2, text_dim=32,
    latent_channels=8, in_channels=24,
)


class TestAblationOperability:
    @pytest.mark.parametrize("flags", ABLATION_FLAGS, ids=lambda f: "-".join(
        f"{k}={v}" for k, v in f.items()))
    def test_variant_runs_end_to_end(self, overfit, flags):
        cfg = ABLATION_CONFIG.with_ablation(**flags)
        torch.manual_seed(0)
        model = ConditionedVideoModel(cfg)
        samples = overfit.samples[:2]
        stage = StageSpec("ablation", 1, (64, 64), steps=2, batch_size=2, lr=1e-4)
        result = run_stage(stage, samples, model, overfit.codec, seed=0, augment=False)
        encoder = ConditionEncoder(overfit.codec, cfg)
        s = samples[0]
        inputs = encoder.encode_sample(s.conditions, s.human_image, s.object_image, (64, 64))
        shape = (1, latent_frames(s.conditions.n), 8, 8, 8)
        z_hat = sample(model, inputs, shape, SamplerConfig(steps=2, seed=0))
        with torch.no_grad():
            video = overfit.codec.decode(z_hat)
        ok = (
            len(result.losses) == 2
            and all(np.isfinite(result.losses))
            and video.shape == (1, 5, 64, 64, 3)
            and bool(torch.isfinite(video).all())
        )
        report(f"ablation[{flags}]", ok, "train+sample+decode")

    def test_without_adapter_bit_exact(self, tiny_inputs_factory, tiny_samples):
        torch.manual_seed(0)
        with_adapters = ConditionedVideoModel(TINY_MODEL_CONFIG)
        without = ConditionedVideoModel(TINY_MODEL_CONFIG.with_ablation(adapter_variant="none"))
        without.load_state_dict(
            {k: v for k, v in with_adapters.state_dict().items() if not k.startswith("hoi_adapters")},
            strict=True,
        )
        inputs = tiny_inputs_factory(TINY_MODEL_CONFIG, tiny_samples[0])
        z_t = torch.randn(1, 2, 4, 4, 4, generator=torch.Generator().manual_seed(2))
        equal = torch.equal(with_adapters(z_t, 0.5, inputs), without(z_t, 0.5, inputs))
        report("ablation[w/o adapter bit-exact]", equal)


class TestCurationFixture:
    def test_six_clip_fixture(self, tmp_path):
        from hoivid.curation import curate, depth_filter, make_depth_fixture, synthetic_backends

        clips = make_depth_fixture(tmp_path)
        records = curate([d for d, _ in clips], synthetic_backends(), tau_rel=0.15)
        kept = {r.clip_id for r in records if r.keep}
        expected = {d.name for d, keep in clips if keep}
        obj = np.zeros((16, 16), dtype=bool)
        hand = np.zeros((16, 16), dtype=bool)
        obj[2:6, 2:6] = True
        hand[10:14, 10:14] = True
        rng = np.random.default_rng(0)
        depth = rng.uniform(1.0, 4.0, (16, 16))
        base = depth_filter(obj, hand, depth, 0.15)
        scale_ok = all(
            depth_filter(obj, hand, k * depth, 0.15).keep == base.keep
            and depth_filter(obj, hand, k * depth, 0.15).delta == pytest.approx(base.delta)
            for k in (0.01, 7.0, 1000.0)
        )
        report(
            "curation-fixture",
            kept == expected and len(kept) == 3 and scale_ok,
            f"kept {sorted(kept)}; depth filter scale-invariant",
        )


class TestInterpolationRasterizationOracles:
    def test_midpoint_and_piecewise(self):
        centers = np.zeros((5, 2))
        centers[4] = [1.0, 1.0]
        clip = make_clip(n=5, centers=centers)
        out = interpolate_keyframes(clip, [0, 4])
        midpoint_ok = np.array_equal(out.object_motion.frames[2], np.array([0.5, 0.5]))

        n, keys = 9, [0, 3, 8]
        centers = np.zeros((n, 2))
        centers[0], centers[3], centers[8] = [0.1, 0.9], [0.7, 0.3], [0.2, 0.2]
        clip = make_clip(n=n, centers=centers)
        out = interpolate_keyframes(clip, keys)

        def oracle(i):
            for lo, hi in zip(keys[:-1], keys[1:]):
                if lo <= i <= hi:
                    t = 0.0 if hi == lo else (i - lo) / (hi - lo)
                    return (1 - t) * centers[lo] + t * centers[hi]

        piecewise_ok = all(
            np.allclose(out.object_motion.frames[i], oracle(i), atol=1e-12) for i in range(n)
        )
        report("interpolation-oracles", midpoint_ok and piecewise_ok)

    def test_rasterizer_determinism_byte_exact(self, tiny_samples):
        skel = tiny_samples[0].conditions.skeleton
        motion = ObjectMotion(MotionEncoding.DOT, np.linspace(0.1, 0.9, 10).reshape(5, 2))
        pose_same = rasterize_pose(skel, (64, 64)).tobytes() == rasterize_pose(skel, (64, 64)).tobytes()
        obj_same = (
            rasterize_object_motion(motion, (64, 64)).tobytes()
            == rasterize_object_motion(motion, (64, 64)).tobytes()
        )
        report("rasterizer-determinism", pose_same and obj_same, "byte-exact")


class TestRopeSuiteGate:
    def test_rope_invariant_suite(self):
        result = run_rope_suite(trials=50, seed=0)
        report("rope-suite", result.passed, f"{result.cases} cases {result.detail}")
