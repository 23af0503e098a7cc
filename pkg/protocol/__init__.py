from .frame import (
    SYNC,
    DecodeError,
    EncodeError,
    FrameFault,
    SensorFrame,
    crc16,
    decode_frame,
    encode_frame,
    frame_length,
    hex_dump,
)
from .link import FrameScanner, LinkStats, samples_to_si, track_sequence

__all__ = [
    "SYNC",
    "SensorFrame",
    "FrameFault",
    "EncodeError",
    "DecodeError",
    "crc16",
    "encode_frame",
    "decode_frame",
    "frame_length",
    "hex_dump",
    "LinkStats",
    "FrameScanner",
    "track_sequence",
    "samples_to_si",
]
