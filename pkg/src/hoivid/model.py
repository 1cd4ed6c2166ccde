"""The fully conditioned generator: context fusion + backbone + adapters.

`ConditionEncoder` turns weak conditions and reference images into latent
tensors through the frozen codec (pure data preparation, no gradients).
`ConditionedVideoModel` consumes those tensors and predicts the velocity
field. Every conditioning pathway is optional: absent inputs contribute
nothing, which is what makes stage transitions and the ablation variants
exact rather than approximate.

Channel layout of the fused input (3c wide): [noisy latent | reference
human | trajectory-pasted object].
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn

from .adapters.audio import AudioProjector, FaceCrossAttention
from .adapters.hoi import HoiAdapterStack, attach_adapters
from .adapters.masks import MaskVolume, build_face_mask, build_object_mask
from .backbone.config import BackboneConfig
from .backbone.model import VideoBackbone
from .backbone.rope import rope_phases
from .backbone.store import ParameterStore
from .codec.vae import SPATIAL_FACTOR, VideoAutoencoder, latent_frames
from .conditions import (
    ConditionClip,
    MotionEncoding,
    ObjectMotion,
    composite_motion_raster,
    rasterize_object_motion,
    rasterize_pose,
)
from .fusion.appearance import broadcast_reference, channel_concat_appearance, token_temporal_concat
from .fusion.motion import MotionEncoder, motion_fuse
from .fusion.paste import paste_object_along_trajectory, paste_spec_from_motion
from .fusion.semantic import HashTextEncoder, TinyImageSummarizer, semantic_token_fusion
from .io.checkpoint import load_checkpoint, save_checkpoint


@dataclass
class ConditionedInputs:
    """Prepared conditioning tensors; any field may be None (pathway off)."""

    z_ref: torch.Tensor | None = None  # [b,1,h,w,c] reference human latent
    z_obj: torch.Tensor | None = None  # [b,1,h,w,c] object latent (full frame)
    z_obj_d: torch.Tensor | None = None  # [b,f,h,w,c] trajectory paste
    pose_latent: torch.Tensor | None = None  # [b,f,h,w,c]
    traj_latent: torch.Tensor | None = None  # [b,f,h,w,c]
    motion_latent: torch.Tensor | None = None  # [b,f,h,w,c] composite (ablation)
    object_mask: MaskVolume | None = None
    face_mask: MaskVolume | None = None
    audio_features: torch.Tensor | None = None  # [b,n,feature_dim]
    texts: list[str | None] | None = None
    human_images: torch.Tensor | None = None  # [b,H,W,3]
    object_images: torch.Tensor | None = None  # [b,H,W,3]

    def astype(self, dtype: torch.dtype) -> "ConditionedInputs":
        def cast(v):
            if isinstance(v, torch.Tensor) and v.is_floating_point():
                return v.to(dtype)
            return v

        changed = {}
        for f in fields(self):
            value = getattr(self, f.name)
            changed[f.name] = cast(value)
        return ConditionedInputs(**changed)


def collate_inputs(items: list[ConditionedInputs]) -> ConditionedInputs:
    """Stack per-sample (batch 1) inputs into one batch. A field must be
    present on all items or on none."""

    def cat(name):
        values = [getattr(it, name) for it in items]
        if all(v is None for v in values):
            return None
        if any(v is None for v in values):
            raise ValueError(f"field {name} present on some items only")
        return torch.cat(values, dim=0)

    texts = None
    if any(it.texts is not None for it in items):
        texts = [t for it in items for t in (it.texts or [None])]
    mask_fields = {}
    for name in ("object_mask", "face_mask"):
        masks = [getattr(it, name) for it in items]
        if all(m is None for m in masks):
            mask_fields[name] = None
        elif any(m is None for m in masks):
            raise ValueError(f"field {name} present on some items only")
        else:
            mask_fields[name] = MaskVolume(torch.cat([m.values for m in masks], dim=0))
    tensor_fields = {
        name: cat(name)
        for name in (
            "z_ref", "z_obj", "z_obj_d", "pose_latent", "traj_latent",
            "motion_latent", "audio_features", "human_images", "object_images",
        )
    }
    return ConditionedInputs(texts=texts, **tensor_fields, **mask_fields)


def convert_motion_encoding(
    motion: ObjectMotion, encoding: str, paste_size: tuple[float, float]
) -> ObjectMotion:
    """Re-express a trajectory under another encoding (ablation variants).
    Boxes take the paste size with zero rotation; the gaussian sigma is a
    quarter of the mean paste side."""
    target = MotionEncoding(encoding)
    if target is motion.encoding:
        return motion
    centers = motion.centers()
    n = motion.n
    if target is MotionEncoding.DOT:
        return ObjectMotion(target, centers)
    if target is MotionEncoding.BBOX:
        w, h = paste_size
        payload = np.concatenate(
            [centers, np.full((n, 1), w), np.full((n, 1), h), np.zeros((n, 1))], axis=1
        )
        return ObjectMotion(target, payload)
    sigma = max(0.25 * (paste_size[0] + paste_size[1]) / 2.0, 1e-3)
    return ObjectMotion(target, np.concatenate([centers, np.full((n, 1), sigma)], axis=1))


class ConditionEncoder:
    """Frozen-codec front end: weak conditions -> ConditionedInputs."""

    def __init__(self, codec: VideoAutoencoder, config: BackboneConfig):
        self.codec = codec
        self.config = config

    def latent_geometry(self, n: int, height: int, width: int) -> tuple[int, int, int]:
        return (latent_frames(n), height // SPATIAL_FACTOR, width // SPATIAL_FACTOR)

    def token_geometry(self, n: int, height: int, width: int) -> tuple[int, int, int]:
        f, h, w = self.latent_geometry(n, height, width)
        p = self.config.patch_size
        return (f, h // p, w // p)

    @torch.no_grad()
    def _encode_video(self, frames: np.ndarray) -> torch.Tensor:
        from .io.frames import to_float

        video = torch.from_numpy(to_float(frames))[None]
        return self.codec.encode(video)

    @torch.no_grad()
    def _encode_image(self, image) -> torch.Tensor:
        if isinstance(image, np.ndarray):
            image = torch.from_numpy(image)
        return self.codec.encode(image[None, None].float())

    @torch.no_grad()
    def encode_sample(
        self,
        clip: ConditionClip,
        human_image,
        object_image,
        resolution: tuple[int, int],
        enable_pose: bool = True,
        enable_object: bool = True,
        enable_audio: bool = True,
        enable_text: bool = True,
    ) -> ConditionedInputs:
        height, width = resolution
        n = clip.n
        flags = self.config.ablation
        f, h, w = self.latent_geometry(n, height, width)

        motion = convert_motion_encoding(
            clip.object_motion, flags.object_motion_encoding, clip.object_paste_size
        )

        out = ConditionedInputs()
        if enable_pose:
            if flags.single_motion_encoder and enable_object:
                composite = composite_motion_raster(clip.skeleton, motion, (height, width))
                out = replace(out, motion_latent=self._encode_video(composite))
            else:
                pose = rasterize_pose(clip.skeleton, (height, width))
                out = replace(out, pose_latent=self._encode_video(pose))
                if enable_object:
                    traj = rasterize_object_motion(motion, (height, width))
                    out = replace(out, traj_latent=self._encode_video(traj))

        if human_image is not None:
            img = torch.as_tensor(np.asarray(human_image), dtype=torch.float32)
            out = replace(
                out, z_ref=self._encode_image(img), human_images=img[None]
            )

        if enable_object and object_image is not None:
            img = torch.as_tensor(np.asarray(object_image), dtype=torch.float32)
            z_obj = self._encode_image(img)
            spec = paste_spec_from_motion(
                clip.object_motion,
                clip.object_paste_size,
                (f, h, w),
                fix_copy=flags.fix_copy,
                start_frame=self.config.paste_start_frame,
            )
            z_obj_d = paste_object_along_trajectory(z_obj, spec, f, h, w)
            mask = build_object_mask(
                spec, self.token_geometry(n, height, width), self.config.patch_size
            )
            out = replace(
                out, z_obj=z_obj, z_obj_d=z_obj_d, object_mask=mask, object_images=img[None]
            )

        if enable_audio and clip.audio is not None and clip.face_boxes is not None:
            out = replace(
                out,
                audio_features=torch.from_numpy(clip.audio.features)[None],
                face_mask=build_face_mask(
                    clip.face_boxes,
                    self.token_geometry(n, height, width),
                    self.config.patch_size,
                ),
            )

        if enable_text:
            out = replace(out, texts=[clip.text])
        return out


class ConditionedVideoModel(nn.Module):
    def __init__(self, config: BackboneConfig | None = None):
        super().__init__()
        self.config = config or BackboneConfig()
        cfg = self.config
        c = cfg.latent_channels
        if cfg.in_channels != 3 * c:
            from dataclasses import replace as dc_replace

            cfg = dc_replace(cfg, in_channels=3 * c)
            self.config = cfg

        self.backbone = VideoBackbone(cfg)
        self.pose_encoder = MotionEncoder(c, 3 * c)
        self.traj_encoder = MotionEncoder(c, 3 * c)
        self.motion_encoder = MotionEncoder(c, 3 * c)  # single-encoder ablation
        self.text_encoder = HashTextEncoder(cfg.text_dim)
        self.human_summarizer = TinyImageSummarizer(cfg.text_dim)
        self.object_summarizer = TinyImageSummarizer(cfg.text_dim)
        self.object_embedder = TinyImageSummarizer(cfg.d_model)

        self.hoi_adapters = HoiAdapterStack()
        self.audio_proj = AudioProjector(cfg.audio_dim, cfg.d_model)
        self.audio_adapters = nn.ModuleDict()
        if cfg.ablation.adapter_variant != "none":
            self.hoi_adapters = attach_adapters(
                self.backbone, cfg.resolved_adapter_layers(), cfg.ablation.adapter_variant
            )
        if cfg.ablation.use_audio:
            for idx in cfg.resolved_adapter_layers():
                self.audio_adapters[str(idx)] = FaceCrossAttention(cfg.d_model, cfg.n_heads)

    @property
    def store(self) -> ParameterStore:
        return ParameterStore(self)

    def _pad_object_channels(self, z_obj: torch.Tensor) -> torch.Tensor:
        """Place the object latent in its channel slot of the 3c layout."""
        zeros = torch.zeros_like(z_obj)
        return torch.cat([zeros, zeros, z_obj], dim=-1)

    def adapter_object_phases(self, hp: int, wp: int) -> torch.Tensor:
        """Rotary phases for the interaction adapter's object token frame,
        pinned at frame index -2."""
        from .codec.patchify import build_token_indices

        _, rows, cols = build_token_indices(1, hp, wp)
        return rope_phases(
            torch.full((hp * wp,), -2), rows, cols,
            self.config.d_head, self.config.rope_theta,
        )

    def _text_branch(self, inputs: ConditionedInputs, batch: int, dtype) -> torch.Tensor:
        texts = inputs.texts if inputs.texts is not None else [None] * batch
        encoded = [self.text_encoder.encode_text(t, batch=1)[0] for t in texts]
        max_len = max((e.shape[0] for e in encoded), default=0)
        text_tokens = torch.zeros(batch, max_len, self.config.text_dim, dtype=dtype)
        for i, e in enumerate(encoded):
            text_tokens[i, : e.shape[0]] = e
        empty = torch.zeros(batch, 0, self.config.text_dim, dtype=dtype)
        human_sem = (
            self.human_summarizer.encode_image(inputs.human_images.to(dtype))
            if inputs.human_images is not None
            else empty
        )
        object_sem = (
            self.object_summarizer.encode_image(inputs.object_images.to(dtype))
            if inputs.object_images is not None
            else empty
        )
        return semantic_token_fusion(text_tokens, human_sem, object_sem)

    def forward(self, z_t: torch.Tensor, t, inputs: ConditionedInputs) -> torch.Tensor:
        """Noisy latent [b,f,h,w,c] + conditions -> velocity [b,f,h,w,c]."""
        cfg = self.config
        flags = cfg.ablation
        b, f, h, w, c = z_t.shape
        dtype = z_t.dtype

        z_ref = (
            broadcast_reference(inputs.z_ref, f)
            if inputs.z_ref is not None
            else torch.zeros_like(z_t)
        )
        z_obj_d = (
            inputs.z_obj_d
            if (inputs.z_obj_d is not None and flags.use_channel_paste)
            else torch.zeros_like(z_t)
        )
        z_cat = channel_concat_appearance(z_t, z_ref, z_obj_d)

        motion_terms = []
        if flags.single_motion_encoder and inputs.motion_latent is not None:
            motion_terms.append(self.motion_encoder(inputs.motion_latent))
        else:
            if inputs.pose_latent is not None:
                motion_terms.append(self.pose_encoder(inputs.pose_latent))
            if inputs.traj_latent is not None:
                motion_terms.append(self.traj_encoder(inputs.traj_latent))
        z_in = motion_fuse(z_cat, *motion_terms)

        grid = self.backbone.patch_embed(z_in)
        obj_tokens = None
        if inputs.z_obj is not None:
            obj_grid = self.backbone.patch_embed(self._pad_object_channels(inputs.z_obj))
            obj_tokens = obj_grid.tokens
            if flags.use_token_concat:
                grid = token_temporal_concat(grid, obj_grid)

        t_vec = self.backbone.time_vector(t, b).to(dtype)
        txt = self.backbone.embed_text(self._text_branch(inputs, b, dtype))

        hoi_layers = set(self.hoi_adapters.layer_indices)
        use_hoi = bool(hoi_layers) and obj_tokens is not None
        audio_tokens = None
        if flags.use_audio and self.audio_adapters and inputs.audio_features is not None:
            audio_tokens = self.audio_proj(inputs.audio_features.to(dtype))

        per_layer_fn = None
        if use_hoi or audio_tokens is not None:
            obj_mask_flat = (
                inputs.object_mask.flat(grid).to(dtype)
                if (use_hoi and inputs.object_mask is not None)
                else None
            )
            face_mask_flat = (
                inputs.face_mask.flat(grid).to(dtype)
                if (audio_tokens is not None and inputs.face_mask is not None)
                else None
            )
            full_phases = self.backbone.token_phases(grid)
            obj_phases = None
            if use_hoi:
                obj_phases = self.adapter_object_phases(
                    grid.video_shape[1], grid.video_shape[2]
                )
            sem_t = t_vec
            if use_hoi and inputs.object_images is not None:
                sem_t = sem_t + self.object_embedder.encode_image(
                    inputs.object_images.to(dtype)
                )[:, 0]

            def per_layer_fn(i, img):
                if use_hoi and i in hoi_layers and obj_mask_flat is not None:
                    img = self.hoi_adapters.layer(i)(
                        img, obj_tokens, obj_mask_flat, sem_t, full_phases, obj_phases
                    )
                if (
                    audio_tokens is not None
                    and str(i) in self.audio_adapters
                    and face_mask_flat is not None
                ):
                    img = self.audio_adapters[str(i)](
                        img, audio_tokens, face_mask_flat, grid.frame_ids
                    )
                return img

        img = self.backbone.forward_tokens(grid, txt, t_vec, per_layer_fn)
        return self.backbone.head(img, grid, t_vec)


MODEL_FILE = "model.pt"
CODEC_FILE = "codec.pt"
CONFIG_FILE = "config.json"
CODEC_CONFIG_FILE = "codec_config.json"


def save_bundle(
    directory: str | Path, model: ConditionedVideoModel, codec: VideoAutoencoder
) -> Path:
    import json
    from dataclasses import asdict

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    model.config.save(directory / CONFIG_FILE)
    with open(directory / CODEC_CONFIG_FILE, "w", encoding="utf-8") as fh:
        json.dump(asdict(codec.config), fh, indent=2)
    save_checkpoint(dict(model.state_dict()), directory / MODEL_FILE)
    save_checkpoint(dict(codec.state_dict()), directory / CODEC_FILE)
    return directory


def load_bundle(directory: str | Path) -> tuple[ConditionedVideoModel, VideoAutoencoder, BackboneConfig]:
    import json

    from .codec.vae import CodecConfig

    directory = Path(directory)
    config = BackboneConfig.load(directory / CONFIG_FILE)
    model = ConditionedVideoModel(config)
    model.load_state_dict(load_checkpoint(directory / MODEL_FILE))
    with open(directory / CODEC_CONFIG_FILE, "r", encoding="utf-8") as fh:
        codec = VideoAutoencoder(CodecConfig(**json.load(fh)))
    codec.load_state_dict(load_checkpoint(directory / CODEC_FILE))
    model.eval()
    codec.eval()
    return model, codec, config
