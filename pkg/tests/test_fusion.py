import numpy as np
import pytest
import torch

from hoivid.codec import PatchEmbed
from hoivid.conditions import MotionEncoding, ObjectMotion
from hoivid.fusion import (
    FusionShapeError,
    HashTextEncoder,
    MotionEncoder,
    PasteError,
    PasteSpec,
    TinyImageSummarizer,
    broadcast_reference,
    channel_concat_appearance,
    first_pixel_frame,
    motion_fuse,
    paste_object_along_trajectory,
    paste_spec_from_motion,
    paste_support_mask,
    semantic_token_fusion,
    split_channel_concat,
    token_temporal_concat,
)


class TestChannelConcat:
    def test_output_is_3c(self):
        c = 4
        z = torch.randn(2, 3, 4, 4, c)
        out = channel_concat_appearance(z, torch.randn_like(z), torch.randn_like(z))
        assert out.shape == (2, 3, 4, 4, 3 * c)

    def test_zero_parts_recover_z(self):
        z = torch.randn(1, 2, 4, 4, 4)
        out = channel_concat_appearance(z, torch.zeros_like(z), torch.zeros_like(z))
        assert torch.equal(out[..., :4], z)
        assert not out[..., 4:].any()

    def test_deconcat_bit_exact(self):
        parts = [torch.randn(1, 2, 4, 4, 5) for _ in range(3)]
        back = split_channel_concat(channel_concat_appearance(*parts))
        for a, b in zip(parts, back):
            assert torch.equal(a, b)

    def test_shape_mismatch_rejected(self):
        z = torch.randn(1, 2, 4, 4, 4)
        with pytest.raises(FusionShapeError):
            channel_concat_appearance(z, torch.randn(1, 2, 4, 5, 4), torch.zeros_like(z))

    @pytest.mark.parametrize("b,f,h,w,c", [(1, 1, 2, 2, 2), (2, 3, 4, 6, 8), (1, 2, 8, 8, 4)])
    def test_3c_for_all_shapes(self, b, f, h, w, c):
        z = torch.randn(b, f, h, w, c)
        out = channel_concat_appearance(z, torch.randn_like(z), torch.randn_like(z))
        assert out.shape[-1] == 3 * c


class TestPaste:
    def test_midpoint_paste_cell_count(self):
        # Oracle: 2x2 paste on an 8x8 latent -> exactly 4 nonzero cells/frame.
        z_obj = torch.ones(1, 1, 4, 4, 3)
        spec = PasteSpec(centers=np.array([[4, 4]] * 3), size=(2, 2))
        out = paste_object_along_trajectory(z_obj, spec, 3, 8, 8)
        for i in range(3):
            assert int((out[0, i].abs().sum(-1) > 0).sum()) == 4

    def test_corner_paste_clipped(self):
        z_obj = torch.ones(1, 1, 4, 4, 3)
        spec = PasteSpec(centers=np.array([[0, 0]]), size=(4, 4))
        out = paste_object_along_trajectory(z_obj, spec, 1, 8, 8)
        nz = (out[0, 0].abs().sum(-1) > 0).numpy()
        assert nz.sum() == 4  # 2x2 survives the clip
        assert nz[:2, :2].all()

    def test_paste_area_ratio(self):
        # Two paste sizes 2x2 vs 4x4 -> support area ratio 1:4.
        z_obj = torch.ones(1, 1, 4, 4, 3)
        small = paste_object_along_trajectory(
            z_obj, PasteSpec(np.array([[4, 4]]), (2, 2)), 1, 8, 8
        )
        large = paste_object_along_trajectory(
            z_obj, PasteSpec(np.array([[4, 4]]), (4, 4)), 1, 8, 8
        )
        a_small = int((small[0, 0].abs().sum(-1) > 0).sum())
        a_large = int((large[0, 0].abs().sum(-1) > 0).sum())
        assert a_large == 4 * a_small

    def test_support_matches_mask_oracle(self):
        torch.manual_seed(0)
        z_obj = torch.randn(1, 1, 4, 4, 3).clamp(0.1)  # no exact zeros
        spec = PasteSpec(np.array([[1, 2], [5, 6], [7, 0]]), (3, 2))
        out = paste_object_along_trajectory(z_obj, spec, 3, 8, 8)
        support = (out[0].abs().sum(-1) > 0).numpy()
        assert np.array_equal(support, paste_support_mask(spec, 3, 8, 8))

    def test_degenerate_size_rejected(self):
        with pytest.raises(PasteError):
            PasteSpec(np.array([[0, 0]]), (0, 2))

    def test_fix_copy_uses_constant_center(self):
        motion = ObjectMotion(MotionEncoding.DOT, np.array([[0.1, 0.1], [0.9, 0.9]]))
        spec = paste_spec_from_motion(motion, (0.25, 0.25), (2, 8, 8), fix_copy=True)
        assert (spec.centers == np.array([[4, 4], [4, 4]])).all()

    def test_start_frame_skips_early_frames(self):
        z_obj = torch.ones(1, 1, 2, 2, 1)
        spec = PasteSpec(np.array([[4, 4]] * 3), (2, 2), start_frame=1)
        out = paste_object_along_trajectory(z_obj, spec, 3, 8, 8)
        assert not out[0, 0].any() and out[0, 1].any() and out[0, 2].any()

    def test_first_pixel_frame_windows(self):
        assert [first_pixel_frame(i) for i in range(4)] == [0, 1, 5, 9]


class TestTokenConcat:
    def make_grids(self, d_model=16):
        embed = PatchEmbed(4, 2, d_model)
        grid = embed(torch.randn(1, 2, 8, 8, 4))
        obj = embed(torch.randn(1, 1, 8, 8, 4))
        return grid, obj

    def test_token_count(self):
        grid, obj = self.make_grids()
        out = token_temporal_concat(grid, obj)
        assert out.num_tokens == (2 + 1) * 16

    def test_prepended_frame_index_minus_one(self):
        grid, obj = self.make_grids()
        out = token_temporal_concat(grid, obj)
        assert (out.frame_ids[:16] == -1).all()
        assert torch.equal(out.frame_ids[16:], grid.frame_ids)

    def test_flag_off_identity(self):
        grid, obj = self.make_grids()
        assert token_temporal_concat(grid, obj, enabled=False) is grid

    def test_multi_frame_object_rejected(self):
        embed = PatchEmbed(4, 2, 16)
        grid = embed(torch.randn(1, 2, 8, 8, 4))
        multi = embed(torch.randn(1, 2, 8, 8, 4))
        with pytest.raises(FusionShapeError):
            token_temporal_concat(grid, multi)

    def test_lossless(self):
        grid, obj = self.make_grids()
        out = token_temporal_concat(grid, obj)
        assert torch.equal(out.tokens[:, :16], obj.tokens)
        assert torch.equal(out.tokens[:, 16:], grid.tokens)


class TestMotionFusion:
    def test_zero_init_encoders_additive_identity(self):
        z_cat = torch.randn(1, 2, 4, 4, 12)
        enc = MotionEncoder(4, 12)
        term = enc(torch.randn(1, 2, 4, 4, 4))
        assert torch.equal(motion_fuse(z_cat, term), z_cat)

    def test_term_by_term_oracle(self):
        torch.manual_seed(0)
        pose_enc, traj_enc = MotionEncoder(4, 12), MotionEncoder(4, 12)
        with torch.no_grad():
            for enc in (pose_enc, traj_enc):
                torch.nn.init.normal_(enc.conv.weight)
                torch.nn.init.normal_(enc.conv.bias)
        z_cat = torch.randn(1, 2, 4, 4, 12)
        pose = torch.randn(1, 2, 4, 4, 4)
        traj = torch.randn(1, 2, 4, 4, 4)
        fused = motion_fuse(z_cat, pose_enc(pose), traj_enc(traj))
        expected = z_cat + pose_enc(pose) + traj_enc(traj)
        assert torch.allclose(fused, expected)

    def test_swapping_inputs_changes_output(self):
        torch.manual_seed(1)
        pose_enc, traj_enc = MotionEncoder(4, 12), MotionEncoder(4, 12)
        with torch.no_grad():
            torch.nn.init.normal_(pose_enc.conv.weight)
            torch.nn.init.normal_(traj_enc.conv.weight)
        z_cat = torch.zeros(1, 2, 4, 4, 12)
        pose = torch.randn(1, 2, 4, 4, 4)
        traj = torch.randn(1, 2, 4, 4, 4)
        a = motion_fuse(z_cat, pose_enc(pose), traj_enc(traj))
        b = motion_fuse(z_cat, pose_enc(traj), traj_enc(pose))
        assert not torch.allclose(a, b)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(FusionShapeError):
            motion_fuse(torch.randn(1, 2, 4, 4, 12), torch.randn(1, 2, 4, 4, 6))


class TestBroadcastReference:
    def test_repeats_single_frame(self):
        z_ref = torch.randn(2, 1, 4, 4, 3)
        out = broadcast_reference(z_ref, 5)
        assert out.shape == (2, 5, 4, 4, 3)
        for i in range(5):
            assert torch.equal(out[:, i], z_ref[:, 0])


class TestSemanticFusion:
    def test_empty_text(self):
        text = torch.zeros(1, 0, 8)
        human = torch.randn(1, 1, 8)
        obj = torch.randn(1, 1, 8)
        out = semantic_token_fusion(text, human, obj)
        assert out.shape == (1, 2, 8)
        assert torch.equal(out[:, 0], human[:, 0])

    def test_token_count(self):
        enc = HashTextEncoder(8)
        text = enc.encode_text("pick up the cup")
        out = semantic_token_fusion(text, torch.randn(1, 1, 8), torch.randn(1, 1, 8))
        assert out.shape[1] == 4 + 2

    def test_different_images_different_tokens(self):
        torch.manual_seed(0)
        summarizer = TinyImageSummarizer(8)
        text = HashTextEncoder(8).encode_text("same words")
        img_a = torch.rand(1, 32, 32, 3) * 2 - 1
        img_b = torch.rand(1, 32, 32, 3) * 2 - 1
        a = semantic_token_fusion(text, summarizer.encode_image(img_a), summarizer.encode_image(img_a))
        b = semantic_token_fusion(text, summarizer.encode_image(img_a), summarizer.encode_image(img_b))
        assert not torch.allclose(a, b)

    def test_hash_text_deterministic(self):
        enc = HashTextEncoder(8)
        assert enc.token_ids("lift the mug") == enc.token_ids("lift the mug")
        assert enc.token_ids(None) == []
