import pytest
import torch

from hoivid.backbone import BackboneConfig
from hoivid.codec import CodecConfig, VideoAutoencoder
from hoivid.model import ConditionEncoder, ConditionedVideoModel
from hoivid.training import make_synthetic_set

TINY_MODEL_CONFIG = BackboneConfig(
    d_model=32,
    n_heads=2,
    n_layers=2,
    patch_size=2,
    text_dim=8,
    latent_channels=4,
    in_channels=12,
    audio_dim=16,
)


@pytest.fixture(scope="session")
def tiny_codec():
    torch.manual_seed(0)
    codec = VideoAutoencoder(CodecConfig(latent_channels=4, base_channels=16))
    codec.eval()
    return codec


@pytest.fixture(scope="session")
def tiny_samples():
    return make_synthetic_set(count=3, n_frames=5, height=32, width=32, seed=3, with_audio=True)


@pytest.fixture()
def tiny_model():
    torch.manual_seed(1)
    return ConditionedVideoModel(TINY_MODEL_CONFIG)


@pytest.fixture(scope="session")
def tiny_inputs_factory(tiny_codec):
    def build(model_config, sample, **kwargs):
        encoder = ConditionEncoder(tiny_codec, model_config)
        return encoder.encode_sample(
            sample.conditions,
            sample.human_image,
            sample.object_image,
            (32, 32),
            **kwargs,
        )

    return build
