"""Receive-side link accounting: counters, sequence gaps, stream resync."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Iterator

import config
from signal_model.trace import AccelSample

from .frame import (
    HEADER_END,
    MAX_SAMPLES,
    SYNC,
    DecodeError,
    SensorFrame,
    declared_count,
    decode_frame,
    frame_length,
    hex_dump,
    is_frame_length,
)

logger = logging.getLogger(__name__)

SEQ_MODULUS = 1 << 16
MILLI_G = config.STANDARD_GRAVITY / 1000.0


@dataclass
class LinkStats:
    """Receiver counters. They only ever increase within a session."""

    frames_ok: int = 0
    frames_crc_rejected: int = 0
    frames_malformed: int = 0
    gaps_detected: int = 0
    frames_missing: int = 0
    samples_delivered: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "LinkStats":
        return cls(**{k: int(v) for k, v in data.items() if k in cls.__dataclass_fields__})


def track_sequence(stats: LinkStats, prev_seq: int, new_seq: int) -> int:
    """Frames missing between two received sequence numbers (16-bit wrap)."""
    gap = (new_seq - prev_seq - 1) % SEQ_MODULUS
    if gap > 0:
        stats.gaps_detected += 1
        stats.frames_missing += gap
    return gap


class FrameScanner:
    """Incremental decoder for a byte stream of concatenated frames.

    Garbage between frames is skipped up to the next sync word (one
    ``frames_malformed`` per skipped run). A frame that fails to decode is
    counted once as ``frames_crc_rejected``. It ends at its declared end when
    a sync word sits there, otherwise at the first later sync word that
    starts a plausible frame; sync pairs inside the rejected frame's own
    bytes never start a second rejection.
    """

    def __init__(self, stats: LinkStats | None = None):
        self.stats = stats if stats is not None else LinkStats()
        self._buf = bytearray()
        self._in_garbage = False

    def feed(self, data: bytes) -> Iterator[SensorFrame]:
        self._buf.extend(data)
        yield from self._drain(final=False)

    def close(self) -> Iterator[SensorFrame]:
        """Flush whatever is left once the stream has ended."""
        yield from self._drain(final=True)

    def _drain(self, final: bool) -> Iterator[SensorFrame]:
        buf = self._buf
        while buf:
            start = buf.find(SYNC)
            if start != 0:
                if start < 0:
                    # keep a trailing A5 that may begin a sync word
                    keep = 1 if buf[-1:] == SYNC[:1] and not final else 0
                    if len(buf) > keep:
                        self._reject_garbage(len(buf) - keep)
                    return
                self._reject_garbage(start)
                continue

            n = declared_count(buf)
            if n is None:
                if final:
                    self._reject_garbage(len(buf))
                return
            if 1 <= n <= MAX_SAMPLES:
                end = frame_length(n)
                if len(buf) < end:
                    if not final:
                        return
                    # a damaged count can overrun the stream tail
                    resync = self._next_frame_start(final)
                    if resync == len(buf) and not is_frame_length(resync):
                        self._reject_garbage(len(buf))
                        return
                    self._log_rejected(f"n={n} overruns the stream", resync)
                    self._reject_frame(resync)
                    continue
                try:
                    frame = decode_frame(bytes(buf[:end]))
                except DecodeError as exc:
                    self._log_rejected(str(exc), end)
                else:
                    del buf[:end]
                    self.stats.frames_ok += 1
                    self._in_garbage = False
                    self.stats.samples_delivered += frame.n
                    yield frame
                    continue
                if buf[end : end + 2] == SYNC or (final and len(buf) == end):
                    self._reject_frame(end)
                    continue
                if len(buf) < end + 2 and not final:
                    return
            else:
                self._log_rejected(f"sample count {n}", HEADER_END)

            resync = self._next_frame_start(final)
            if resync is None:
                return
            self._reject_frame(resync)

    def _next_frame_start(self, final: bool) -> int | None:
        """Offset of the first sync word past a rejected frame at offset 0.

        None means more bytes are needed to decide.
        """
        pos = frame_length(1)
        while True:
            pos = self._buf.find(SYNC, pos)
            if pos < 0:
                return len(self._buf) if final else None
            plausible = self._starts_frame(pos, final)
            if plausible is None:
                return None
            if plausible:
                return pos
            pos += 1

    def _starts_frame(self, pos: int, final: bool) -> bool | None:
        """Whether a frame at ``pos`` decodes, or at least ends on a sync word."""
        buf = self._buf
        if len(buf) < pos + HEADER_END:
            return None if not final else False
        n = buf[pos + HEADER_END - 1]
        if not 1 <= n <= MAX_SAMPLES:
            return False
        end = pos + frame_length(n)
        if len(buf) < end:
            return None if not final else False
        try:
            decode_frame(bytes(buf[pos:end]))
        except DecodeError:
            pass
        else:
            return True
        if len(buf) < end + 2:
            return len(buf) == end if final else None
        return buf[end : end + 2] == SYNC

    def _log_rejected(self, reason: str, length: int) -> None:
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug("Rejected frame: %s\n%s", reason, hex_dump(self._buf[:length]))

    def _reject_frame(self, length: int) -> None:
        del self._buf[:length]
        self.stats.frames_crc_rejected += 1
        self._in_garbage = False

    def _reject_garbage(self, length: int) -> None:
        del self._buf[:length]
        if not self._in_garbage:
            self.stats.frames_malformed += 1
        self._in_garbage = True
        logger.debug("Skipped %d bytes of unframed data", length)


def samples_to_si(frame: SensorFrame, sample_rate: float) -> list[AccelSample]:
    """Milli-g to m/s2, centi-degC to degC; sample i at t0 + i / sample_rate."""
    t0 = frame.t0 / 1000.0
    skin_temp = frame.skin_temp / 100.0
    pressure = float(frame.pressure)
    return [
        AccelSample(
            t=t0 + i / sample_rate,
            ax=ax * MILLI_G,
            ay=ay * MILLI_G,
            az=az * MILLI_G,
            skin_temp=skin_temp,
            pressure=pressure,
        )
        for i, (ax, ay, az) in enumerate(frame.samples)
    ]
