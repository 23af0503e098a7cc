"""Seeded frame-granular link impairment (drops and single-bit flips)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from errors import ParameterError
from protocol.frame import SYNC

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinkConfig:
    loss_prob: float = 0.0
    bit_flip_prob: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("loss_prob", "bit_flip_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1], got {value}")

    @property
    def impaired(self) -> bool:
        return self.loss_prob > 0 or self.bit_flip_prob > 0


@dataclass
class ImpairmentLog:
    """Ground truth of what the channel did to each frame index."""

    frames_sent: int = 0
    dropped: list[int] = field(default_factory=list)
    corrupted: list[tuple[int, int]] = field(default_factory=list)

    @property
    def corrupted_frames(self) -> list[int]:
        return [index for index, _ in self.corrupted]

    def undelivered_runs(self) -> int:
        """Runs of dropped or corrupted frames followed by an intact frame."""
        lost = set(self.dropped) | set(self.corrupted_frames)
        return sum(1 for i in range(1, self.frames_sent) if i not in lost and (i - 1) in lost)

    def to_dict(self) -> dict:
        return {
            "frames_sent": self.frames_sent,
            "dropped": list(self.dropped),
            "corrupted": [[index, bit] for index, bit in self.corrupted],
        }


def impair_link(frames: Sequence[bytes], cfg: LinkConfig) -> tuple[bytes, ImpairmentLog]:
    """Drop each frame with loss_prob, else flip one bit with bit_flip_prob.

    The flipped bit is drawn uniformly from the bits after the sync word.
    """
    rng = np.random.default_rng(cfg.seed)
    log = ImpairmentLog(frames_sent=len(frames))
    out = bytearray()
    sync_bits = 8 * len(SYNC)
    for index, frame in enumerate(frames):
        if rng.random() < cfg.loss_prob:
            log.dropped.append(index)
            continue
        if rng.random() < cfg.bit_flip_prob:
            bit = int(rng.integers(sync_bits, 8 * len(frame)))
            damaged = bytearray(frame)
            damaged[bit // 8] ^= 0x80 >> (bit % 8)
            log.corrupted.append((index, bit))
            out.extend(damaged)
        else:
            out.extend(frame)
    logger.info(
        "Link delivered %d of %d frames (%d dropped, %d corrupted)",
        len(frames) - len(log.dropped),
        len(frames),
        len(log.dropped),
        len(log.corrupted),
    )
    return bytes(out), log
