import numpy as np
import pytest

from hoivid.conditions import (
    ConditionFileError,
    condition_from_json,
    condition_to_json,
    load_condition_file,
    save_condition_file,
    validate_condition_json,
)

from .test_conditions import make_clip


def doc_fixture(n=3):
    return condition_to_json(make_clip(n=n))


class TestValidation:
    def test_valid_document(self):
        assert validate_condition_json(doc_fixture()) == []

    def test_unknown_top_level_key_rejected(self):
        doc = doc_fixture()
        doc["extra"] = 1
        errors = validate_condition_json(doc)
        assert ("/extra", "unknown key") in errors

    def test_missing_key_reported(self):
        doc = doc_fixture()
        del doc["object_motion"]
        assert any(path == "/object_motion" for path, _ in validate_condition_json(doc))

    def test_zero_paste_size_cites_invariant_path(self):
        doc = doc_fixture()
        doc["object_paste_size"] = [0, 0]
        errors = validate_condition_json(doc)
        assert errors and errors[0][0] == "/object_paste_size"

    def test_frame_count_mismatch(self):
        doc = doc_fixture(n=3)
        doc["object_motion"]["frames"].pop()
        assert any(path == "/object_motion/frames" for path, _ in validate_condition_json(doc))

    def test_out_of_range_joint(self):
        doc = doc_fixture()
        doc["skeleton"]["frames"][0]["joints"][0]["x"] = 2.0
        errors = validate_condition_json(doc)
        assert errors and errors[0][0].startswith("/skeleton/frames/0/joints/0")

    def test_bad_encoding(self):
        doc = doc_fixture()
        doc["object_motion"]["encoding"] = "spline"
        assert any(path == "/object_motion/encoding" for path, _ in validate_condition_json(doc))

    def test_loader_raises_with_path(self):
        doc = doc_fixture()
        doc["version"] = 99
        with pytest.raises(ConditionFileError) as err:
            condition_from_json(doc)
        assert err.value.path == "/version"


class TestRoundTrip:
    @pytest.mark.parametrize("encoding", ["dot", "bbox", "gaussian_dot"])
    def test_json_round_trip(self, encoding):
        from hoivid.conditions import MotionEncoding

        clip = make_clip(n=4, encoding=MotionEncoding(encoding))
        doc = condition_to_json(clip)
        back = condition_from_json(doc)
        assert condition_to_json(back) == doc

    def test_face_boxes_round_trip(self):
        clip = make_clip(n=2)
        from dataclasses import replace

        clip = replace(clip, face_boxes=np.array([[0.5, 0.3, 0.2, 0.2]] * 2))
        doc = condition_to_json(clip)
        back = condition_from_json(doc)
        assert np.array_equal(back.face_boxes, clip.face_boxes)

    def test_file_round_trip(self, tmp_path):
        clip = make_clip(n=3)
        path = tmp_path / "c.json"
        save_condition_file(clip, path)
        loaded = load_condition_file(path)
        assert condition_to_json(loaded) == condition_to_json(clip)
