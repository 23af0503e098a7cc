"""Bit-exact sensor frame codec.

Wire layout (big-endian)::

    A5 5A | node_id u8 | seq u16 | t0 u32 ms | n u8 | n x (ax, ay, az) i16 milli-g
          | skin_temp i16 centi-degC | pressure u32 Pa | crc u16

The CRC is CRC-16/CCITT-FALSE over every byte between the sync word and the
CRC itself. A frame is 18 + 6n bytes long.
"""

from __future__ import annotations

import binascii
import struct
from dataclasses import dataclass
from enum import Enum

from errors import CardiorespError, ParameterError

SYNC = b"\xa5\x5a"
MAX_SAMPLES = 16
HEADER = struct.Struct(">BHIB")
TRAILER = struct.Struct(">hI")
CRC = struct.Struct(">H")
HEADER_END = len(SYNC) + HEADER.size
FIXED_LENGTH = len(SYNC) + HEADER.size + TRAILER.size + CRC.size

_INT16 = (-32768, 32767)


class FrameFault(str, Enum):
    BAD_SYNC = "bad_sync"
    TRUNCATED = "truncated"
    BAD_CRC = "bad_crc"
    BAD_COUNT = "bad_count"


class EncodeError(ParameterError):
    """A frame field is outside its wire range."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class DecodeError(CardiorespError):
    def __init__(self, fault: FrameFault, message: str = ""):
        self.fault = fault
        super().__init__(f"{fault.value}: {message}" if message else fault.value)


def crc16(data: bytes) -> int:
    """CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF)."""
    return binascii.crc_hqx(data, 0xFFFF)


def frame_length(n: int) -> int:
    return FIXED_LENGTH + 6 * n


def is_frame_length(size: int) -> bool:
    n, rest = divmod(size - FIXED_LENGTH, 6)
    return rest == 0 and 1 <= n <= MAX_SAMPLES


@dataclass(frozen=True)
class SensorFrame:
    node_id: int
    seq: int
    t0: int
    samples: tuple[tuple[int, int, int], ...]
    skin_temp: int
    pressure: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(tuple(int(v) for v in s) for s in self.samples))

    @property
    def n(self) -> int:
        return len(self.samples)

    def validate(self) -> None:
        """Raise EncodeError naming the first field outside its wire range."""
        _check("node_id", self.node_id, 0, 0xFF)
        _check("seq", self.seq, 0, 0xFFFF)
        _check("t0", self.t0, 0, 0xFFFFFFFF)
        if not 1 <= self.n <= MAX_SAMPLES:
            raise EncodeError("n", f"sample count must be in 1..{MAX_SAMPLES}, got {self.n}")
        for i, sample in enumerate(self.samples):
            if len(sample) != 3:
                raise EncodeError(f"samples[{i}]", "each sample needs exactly three axes")
            for axis, value in zip("xyz", sample):
                _check(f"samples[{i}].a{axis}", value, *_INT16)
        _check("skin_temp", self.skin_temp, *_INT16)
        _check("pressure", self.pressure, 0, 0xFFFFFFFF)


def _check(field: str, value: int, low: int, high: int) -> None:
    if not isinstance(value, int) or isinstance(value, bool):
        raise EncodeError(field, f"must be an integer, got {value!r}")
    if not low <= value <= high:
        raise EncodeError(field, f"{value} outside [{low}, {high}]")


def encode_frame(frame: SensorFrame) -> bytes:
    frame.validate()
    body = HEADER.pack(frame.node_id, frame.seq, frame.t0, frame.n)
    body += struct.pack(f">{3 * frame.n}h", *(v for sample in frame.samples for v in sample))
    body += TRAILER.pack(frame.skin_temp, frame.pressure)
    return SYNC + body + CRC.pack(crc16(body))


def declared_count(data: bytes) -> int | None:
    """Sample count from a frame header, or None if the header is incomplete."""
    return data[HEADER_END - 1] if len(data) >= HEADER_END else None


def decode_frame(data: bytes) -> SensorFrame:
    """Parse one complete frame, raising DecodeError with its FrameFault.

    Checks run in order: header length, sync, declared length, CRC, count,
    surplus bytes. A buffer shorter than its declared length but itself a
    whole-frame length is checked against the CRC at its own length, so a
    damaged count byte reports ``bad_crc``.
    """
    data = bytes(data)
    if len(data) < HEADER_END:
        raise DecodeError(FrameFault.TRUNCATED, f"{len(data)} bytes is shorter than the {HEADER_END}-byte header")
    if data[:2] != SYNC:
        raise DecodeError(FrameFault.BAD_SYNC, f"expected a5 5a, got {data[:2].hex(' ')}")
    node_id, seq, t0, n = HEADER.unpack_from(data, len(SYNC))
    count_ok = 1 <= n <= MAX_SAMPLES
    expected = frame_length(n) if count_ok else len(data)
    if len(data) < expected:
        if not is_frame_length(len(data)):
            raise DecodeError(FrameFault.TRUNCATED, f"n={n} needs {expected} bytes, got {len(data)}")
        expected = len(data)
    (received,) = CRC.unpack_from(data, expected - CRC.size)
    computed = crc16(data[len(SYNC) : expected - CRC.size])
    if received != computed:
        raise DecodeError(FrameFault.BAD_CRC, f"crc {received:04x} != computed {computed:04x}")
    if not count_ok:
        raise DecodeError(FrameFault.BAD_COUNT, f"sample count {n} outside 1..{MAX_SAMPLES}")
    if len(data) < frame_length(n):
        raise DecodeError(FrameFault.TRUNCATED, f"n={n} needs {frame_length(n)} bytes, got {len(data)}")
    if len(data) > expected:
        raise DecodeError(FrameFault.TRUNCATED, f"{len(data) - expected} bytes beyond the declared length")

    flat = struct.unpack_from(f">{3 * n}h", data, HEADER_END)
    skin_temp, pressure = TRAILER.unpack_from(data, HEADER_END + 6 * n)
    samples = tuple(tuple(flat[i : i + 3]) for i in range(0, len(flat), 3))
    return SensorFrame(node_id, seq, t0, samples, skin_temp, pressure)


def hex_dump(data: bytes, width: int = 16) -> str:
    """Two lowercase hex digits per byte, space separated, ``width`` bytes per line."""
    data = bytes(data)
    return "\n".join(data[i : i + width].hex(" ") for i in range(0, len(data), width))
