import numpy as np
import pytest

from hoivid.curation import (
    ClipRecord,
    DepthFilterError,
    PerceptionBackends,
    curate,
    depth_filter,
    evaluate_clip,
    load_manifest,
    make_depth_fixture,
    sampled_indices,
    synthetic_backends,
)
from hoivid.curation.pipeline import _rle_decode, _rle_encode


class TestDepthFilter:
    def masks(self, size=16):
        obj = np.zeros((size, size), dtype=bool)
        hand = np.zeros((size, size), dtype=bool)
        obj[2:6, 2:6] = True
        hand[10:14, 10:14] = True
        return obj, hand

    def test_constant_depth_keeps(self):
        obj, hand = self.masks()
        verdict = depth_filter(obj, hand, np.full((16, 16), 2.5), 0.25)
        assert verdict.keep and verdict.delta == 0.0

    def test_hand_computed_example(self):
        # hand depth 2.0, object depth 3.0 -> delta |3-2|/2 = 0.5, dropped.
        obj, hand = self.masks()
        depth = np.full((16, 16), 1.0)
        depth[obj] = 3.0
        depth[hand] = 2.0
        verdict = depth_filter(obj, hand, depth, 0.25)
        assert verdict.delta == pytest.approx(0.5)
        assert not verdict.keep

    def test_empty_object_mask(self):
        _, hand = self.masks()
        verdict = depth_filter(np.zeros((16, 16), dtype=bool), hand, np.ones((16, 16)), 0.25)
        assert not verdict.keep and verdict.reason == "no object"

    def test_empty_hand_mask(self):
        obj, _ = self.masks()
        verdict = depth_filter(obj, np.zeros((16, 16), dtype=bool), np.ones((16, 16)), 0.25)
        assert not verdict.keep and verdict.reason == "no hand"

    def test_nonpositive_depth_rejected(self):
        obj, hand = self.masks()
        with pytest.raises(DepthFilterError):
            depth_filter(obj, hand, np.zeros((16, 16)), 0.25)

    def test_scale_invariance(self):
        obj, hand = self.masks()
        rng = np.random.default_rng(0)
        depth = rng.uniform(1.0, 4.0, size=(16, 16))
        base = depth_filter(obj, hand, depth, 0.15)
        for k in (0.1, 3.0, 250.0):
            scaled = depth_filter(obj, hand, k * depth, 0.15)
            assert scaled.keep == base.keep
            assert scaled.delta == pytest.approx(base.delta)

    def test_absolute_mode(self):
        obj, hand = self.masks()
        depth = np.full((16, 16), 1.0)
        depth[obj] = 3.0
        depth[hand] = 2.0
        verdict = depth_filter(obj, hand, depth, 1.5, mode="absolute")
        assert verdict.keep and verdict.delta == pytest.approx(1.0)


@pytest.fixture(scope="module")
def fixture_clips(tmp_path_factory):
    root = tmp_path_factory.mktemp("depth_fixture")
    return make_depth_fixture(root)


class TestCurate:
    def test_fixture_keeps_exactly_interactions(self, fixture_clips):
        dirs = [d for d, _ in fixture_clips]
        records = curate(dirs, synthetic_backends(), tau_rel=0.15)
        kept = {r.clip_id for r in records if r.keep}
        expected = {d.name for d, keep in fixture_clips if keep}
        assert kept == expected
        assert len(records) == 6

    def test_negative_recognizer_short_circuits(self, fixture_clips):
        calls = {"ground": 0, "segment": 0, "depth": 0}

        class NoHoi:
            def recognize(self, frames):
                return False, ""

        class Spy:
            def ground(self, frames, caption):
                calls["ground"] += 1
                return np.zeros(frames.shape[:3], dtype=bool)

            def segment(self, frames):
                calls["segment"] += 1
                return np.zeros(frames.shape[:3], dtype=bool)

            def estimate(self, frame):
                calls["depth"] += 1
                return np.ones(frame.shape[:2])

        backends = PerceptionBackends(NoHoi(), Spy(), Spy(), Spy())
        record = evaluate_clip(fixture_clips[0][0], backends)
        assert not record.keep
        assert record.reject_reason == "no interaction detected"
        assert calls == {"ground": 0, "segment": 0, "depth": 0}

    def test_backend_error_recorded_and_continues(self, fixture_clips):
        class Boom:
            def recognize(self, frames):
                return True, "thing"

            def ground(self, frames, caption):
                raise RuntimeError("model fell over")

        backends = PerceptionBackends(
            Boom(), Boom(), synthetic_backends().hand_segmenter, synthetic_backends().depth_estimator
        )
        dirs = [d for d, _ in fixture_clips]
        records = curate(dirs, backends)
        assert len(records) == 6
        assert all(r.reject_reason.startswith("backend_error") for r in records)

    def test_resume_no_duplicates(self, fixture_clips, tmp_path):
        manifest = tmp_path / "manifest.jsonl"
        dirs = [d for d, _ in fixture_clips]
        first = curate(dirs[:3], synthetic_backends(), manifest_path=manifest)
        assert len(first) == 3
        again = curate(dirs, synthetic_backends(), manifest_path=manifest)
        assert len(again) == 6
        persisted = load_manifest(manifest)
        assert len(persisted) == 6
        assert len({r.clip_id for r in persisted}) == 6
        # Second full run is a no-op on the manifest.
        curate(dirs, synthetic_backends(), manifest_path=manifest)
        assert len(load_manifest(manifest)) == 6

    def test_order_independence(self, fixture_clips):
        dirs = [d for d, _ in fixture_clips]
        forward = curate(dirs, synthetic_backends())
        backward = curate(list(reversed(dirs)), synthetic_backends())
        by_id_fwd = {r.clip_id: r.keep for r in forward}
        by_id_bwd = {r.clip_id: r.keep for r in backward}
        assert by_id_fwd == by_id_bwd
        assert [r.clip_id for r in backward] == [d.name for d in reversed(dirs)]

    def test_worker_pool_matches_serial(self, fixture_clips):
        dirs = [d for d, _ in fixture_clips]
        serial = curate(dirs, synthetic_backends(), workers=1)
        parallel = curate(dirs, synthetic_backends(), workers=4)
        assert [(r.clip_id, r.keep) for r in serial] == [(r.clip_id, r.keep) for r in parallel]

    def test_record_round_trip(self, fixture_clips):
        record = evaluate_clip(fixture_clips[0][0], synthetic_backends())
        back = ClipRecord.from_json(record.to_json())
        assert back.clip_id == record.clip_id
        assert back.keep == record.keep
        for a, b in zip(back.object_masks, record.object_masks):
            assert np.array_equal(a, b)

    def test_sampled_indices_even_spacing(self):
        assert sampled_indices(9, 5) == [0, 2, 4, 6, 8]
        assert sampled_indices(3, 5) == [0, 1, 2]


class TestRle:
    def test_round_trip(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            mask = rng.random((7, 9)) < 0.3
            assert np.array_equal(_rle_decode(_rle_encode(mask)), mask)

    def test_empty_and_full(self):
        for mask in (np.zeros((4, 4), dtype=bool), np.ones((4, 4), dtype=bool)):
            assert np.array_equal(_rle_decode(_rle_encode(mask)), mask)
