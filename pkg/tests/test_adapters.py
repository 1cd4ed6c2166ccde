import numpy as np
import pytest
import torch

from hoivid.adapters import (
    AdapterError,
    AudioProjector,
    FaceCrossAttention,
    HoiAdapterLayer,
    MaskVolume,
    attach_adapters,
    build_face_mask,
    build_object_mask,
)
from hoivid.backbone import BackboneConfig, VideoBackbone, rope_phases
from hoivid.fusion import PasteSpec

CFG = BackboneConfig(
    d_model=32, n_heads=2, n_layers=4, patch_size=2, text_dim=8,
    latent_channels=4, in_channels=4,
)


def adapter_inputs(seed=0, d_model=32, n_video=8, n_obj=4):
    g = torch.Generator().manual_seed(seed)
    video = torch.randn(1, n_video, d_model, generator=g)
    obj = torch.randn(1, n_obj, d_model, generator=g)
    sem_t = torch.randn(1, d_model, generator=g)
    vid_phases = rope_phases(torch.arange(n_video), torch.zeros(n_video, dtype=torch.long),
                             torch.arange(n_video), 16)
    obj_phases = rope_phases(torch.full((n_obj,), -2), torch.zeros(n_obj, dtype=torch.long),
                             torch.arange(n_obj), 16)
    return video, obj, sem_t, vid_phases, obj_phases


class TestObjectMask:
    def test_single_patch_core_plus_ring(self):
        # Paste covers one 2x2-latent patch -> 1 core token plus dilation ring.
        spec = PasteSpec(np.array([[5, 5]]), (2, 2))  # cells rows 4:6, cols 4:6
        mask = build_object_mask(spec, (1, 4, 4), patch_size=2)
        vals = mask.values[0, 0].numpy()
        # Core token (2,2); ring covers neighbors.
        expected = np.zeros((4, 4))
        expected[1:4, 1:4] = 1
        assert np.array_equal(vals, expected)

    def test_empty_paste_all_zero(self):
        spec = PasteSpec(np.array([[4, 4]]), (2, 2), start_frame=5)
        mask = build_object_mask(spec, (1, 4, 4), patch_size=2)
        assert not mask.values.any()

    def test_full_frame_paste_all_ones(self):
        spec = PasteSpec(np.array([[4, 4]]), (8, 8))
        mask = build_object_mask(spec, (1, 4, 4), patch_size=2)
        assert mask.values.all()

    def test_face_mask_from_boxes(self):
        boxes = np.array([[0.25, 0.25, 0.25, 0.25]])
        mask = build_face_mask(boxes, (1, 4, 4), patch_size=2)
        vals = mask.values[0, 0].numpy()
        assert vals[0, 0] == 1 and vals[3, 3] == 0

    def test_non_binary_rejected(self):
        with pytest.raises(Exception):
            MaskVolume(torch.full((1, 1, 2, 2), 0.5))


class TestHoiAdapterLayer:
    @pytest.mark.parametrize("variant", ["self_attn", "cross_attn"])
    def test_zero_mask_identity(self, variant):
        torch.manual_seed(0)
        layer = HoiAdapterLayer(32, 2, variant=variant)
        video, obj, sem_t, vp, op = adapter_inputs()
        mask = torch.zeros(1, 8)
        out = layer(video, obj, mask, sem_t, vp, op)
        assert torch.equal(out, video)

    @pytest.mark.parametrize("variant", ["self_attn", "cross_attn"])
    def test_zero_output_projection_identity(self, variant):
        torch.manual_seed(0)
        layer = HoiAdapterLayer(32, 2, variant=variant)
        layer.zero_output()
        video, obj, sem_t, vp, op = adapter_inputs()
        mask = torch.ones(1, 8)
        assert torch.equal(layer(video, obj, mask, sem_t, vp, op), video)

    @pytest.mark.parametrize("variant", ["self_attn", "cross_attn"])
    def test_masked_locality_with_trained_weights(self, variant):
        # Positions with mask 0 stay bit-identical even with random weights.
        for seed in range(5):
            torch.manual_seed(seed)
            layer = HoiAdapterLayer(32, 2, variant=variant)
            with torch.no_grad():
                for p in layer.parameters():
                    p.normal_()
            video, obj, sem_t, vp, op = adapter_inputs(seed)
            mask = (torch.rand(1, 8) < 0.5).float()
            out = layer(video, obj, mask, sem_t, vp, op)
            off = mask[0] == 0
            assert torch.equal(out[0, off], video[0, off])
            assert not torch.equal(out[0, ~off], video[0, ~off])

    def test_mask_shape_mismatch_rejected(self):
        layer = HoiAdapterLayer(32, 2)
        video, obj, sem_t, vp, op = adapter_inputs()
        with pytest.raises(AdapterError):
            layer(video, obj, torch.ones(1, 5), sem_t, vp, op)


class TestAttachAdapters:
    def test_even_layer_placement(self):
        backbone = VideoBackbone(CFG)
        stack = attach_adapters(backbone)
        assert stack.layer_indices == (0, 2)

    def test_init_weight_equality(self):
        torch.manual_seed(0)
        backbone = VideoBackbone(CFG)
        stack = attach_adapters(backbone, (0, 2), zero_init_output=False)
        for idx in (0, 2):
            adapter = stack.layer(idx)
            block = backbone.blocks[idx]
            assert torch.equal(adapter.qkv_video.weight, block.img_attn.qkv.weight)
            assert torch.equal(adapter.qkv_obj.weight, block.txt_attn.qkv.weight)
            assert torch.equal(adapter.proj.weight, block.img_attn.proj.weight)

    def test_zero_init_output_default(self):
        backbone = VideoBackbone(CFG)
        stack = attach_adapters(backbone, (0,))
        assert not stack.layer(0).proj.weight.any()
        assert torch.equal(stack.layer(0).qkv_video.weight, backbone.blocks[0].img_attn.qkv.weight)

    def test_provenance_resolves(self):
        backbone = VideoBackbone(CFG)
        stack = attach_adapters(backbone, (0, 2), zero_init_output=False)
        host = dict(backbone.named_parameters())
        adapter_params = dict(stack.named_parameters())
        assert stack.sources
        for adapter_name, host_name in stack.sources.items():
            assert host_name in host
            assert adapter_params[adapter_name].shape == host[host_name].shape
            assert torch.equal(adapter_params[adapter_name], host[host_name])

    def test_duplicate_attachment_rejected(self):
        backbone = VideoBackbone(CFG)
        with pytest.raises(AdapterError):
            attach_adapters(backbone, (0, 0))

    def test_out_of_range_rejected(self):
        backbone = VideoBackbone(CFG)
        with pytest.raises(AdapterError):
            attach_adapters(backbone, (7,))

    def test_clone_independence(self):
        backbone = VideoBackbone(CFG)
        stack = attach_adapters(backbone, (0,), zero_init_output=False)
        with torch.no_grad():
            stack.layer(0).qkv_video.weight.add_(1.0)
        assert not torch.equal(
            stack.layer(0).qkv_video.weight, backbone.blocks[0].img_attn.qkv.weight
        )


class TestAudioProjector:
    def test_silence_zero_tokens(self):
        proj = AudioProjector(16, 32)
        out = proj(torch.zeros(1, 5, 16))
        assert torch.equal(out, torch.zeros(1, 2, 32))

    def test_window_counts(self):
        # n=5 -> windows {0}, {1..4} -> 2 audio tokens.
        feats = torch.arange(5, dtype=torch.float32)[None, :, None].expand(1, 5, 16)
        pooled = AudioProjector.window_mean(feats)
        assert pooled.shape == (1, 2, 16)
        assert pooled[0, 0, 0] == 0.0
        assert pooled[0, 1, 0] == pytest.approx((1 + 2 + 3 + 4) / 4)

    def test_deterministic(self):
        torch.manual_seed(0)
        proj = AudioProjector(16, 32)
        feats = torch.randn(1, 9, 16)
        assert torch.equal(proj(feats), proj(feats))

    def test_length_mismatch_rejected(self):
        proj = AudioProjector(16, 32)
        with pytest.raises(Exception):
            proj(torch.zeros(1, 4, 16))  # 4 is not 4k+1


class TestFaceCrossAttention:
    def make(self, seed=0, zero_v=True):
        torch.manual_seed(seed)
        attn = FaceCrossAttention(32, 2)
        if not zero_v:
            with torch.no_grad():
                attn.w_v.weight.normal_()
                attn.w_v.bias.normal_()
        return attn

    def test_zero_mask_identity(self):
        attn = self.make(zero_v=False)
        video = torch.randn(1, 8, 32)
        audio = torch.randn(1, 2, 32)
        frame_ids = torch.tensor([0, 0, 0, 0, 1, 1, 1, 1])
        out = attn(video, audio, torch.zeros(1, 8), frame_ids)
        assert torch.equal(out, video)

    def test_zero_v_projection_identity(self):
        attn = self.make(zero_v=True)
        video = torch.randn(1, 8, 32)
        audio = torch.randn(1, 2, 32)
        frame_ids = torch.tensor([0, 0, 0, 0, 1, 1, 1, 1])
        out = attn(video, audio, torch.ones(1, 8), frame_ids)
        assert torch.equal(out, video)

    def test_single_key_closed_form(self):
        # Softmax over one key is 1, so the update is mask * W_V(audio_token).
        attn = self.make(zero_v=False)
        video = torch.randn(1, 8, 32)
        audio = torch.randn(1, 2, 32)
        frame_ids = torch.tensor([0, 0, 0, 0, 1, 1, 1, 1])
        mask = (torch.rand(1, 8) < 0.5).float()
        out = attn(video, audio, mask, frame_ids)
        v = attn.w_v(audio)  # [1, 2, 32]
        expected = video + mask[..., None] * v[:, frame_ids]
        assert torch.allclose(out, expected, atol=1e-6)

    def test_face_locality_random_weights(self):
        for seed in range(5):
            attn = self.make(seed=seed, zero_v=False)
            video = torch.randn(1, 8, 32)
            audio = torch.randn(1, 2, 32)
            frame_ids = torch.tensor([0, 0, 0, 0, 1, 1, 1, 1])
            mask = (torch.rand(1, 8) < 0.5).float()
            out = attn(video, audio, mask, frame_ids)
            off = mask[0] == 0
            assert torch.equal(out[0, off], video[0, off])

    def test_window_mean_invariance(self):
        # Permuting audio frames inside one latent window leaves tokens
        # unchanged; permuting across windows changes only those frames.
        attn = self.make(zero_v=False)
        proj = AudioProjector(16, 32)
        with torch.no_grad():
            for p in proj.parameters():
                p.normal_()
        feats = torch.randn(1, 9, 16)  # windows {0}, {1..4}, {5..8}
        permuted_inside = feats.clone()
        permuted_inside[0, 1:5] = feats[0, torch.tensor([4, 2, 1, 3])]
        assert torch.allclose(proj(feats), proj(permuted_inside), atol=1e-6)
        swapped_windows = feats.clone()
        swapped_windows[0, 1:5], swapped_windows[0, 5:9] = feats[0, 5:9], feats[0, 1:5]
        tokens_a = proj(feats)
        tokens_b = proj(swapped_windows)
        assert torch.allclose(tokens_a[0, 0], tokens_b[0, 0], atol=1e-6)
        assert not torch.allclose(tokens_a[0, 1], tokens_b[0, 1])
