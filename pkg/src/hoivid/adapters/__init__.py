from .masks import MaskShapeError, MaskVolume, build_face_mask, build_object_mask
from .hoi import AdapterError, HoiAdapterLayer, HoiAdapterStack, attach_adapters
from .audio import AudioProjector, FaceCrossAttention

__all__ = [
    "AdapterError",
    "AudioProjector",
    "FaceCrossAttention",
    "HoiAdapterLayer",
    "HoiAdapterStack",
    "MaskShapeError",
    "MaskVolume",
    "attach_adapters",
    "build_face_mask",
    "build_object_mask",
]
