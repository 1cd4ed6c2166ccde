from .frames import read_frames, read_image, to_float, to_uint8, write_frames, write_image
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "load_checkpoint",
    "read_frames",
    "read_image",
    "save_checkpoint",
    "to_float",
    "to_uint8",
    "write_frames",
    "write_image",
]
