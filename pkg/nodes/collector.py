"""Central node: byte stream -> frames -> sample timeline -> vitals per segment."""

from __future__ import annotations

import logging
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

import config
from dsp.pipeline import run_pipeline
from dsp.settings import PipelineConfig
from errors import ParameterError
from protocol.frame import SensorFrame
from protocol.link import FrameScanner, LinkStats, SEQ_MODULUS, samples_to_si, track_sequence
from signal_model.trace import AccelTrace

from .session_store import SessionRecord, SessionStore

logger = logging.getLogger(__name__)

SESSION_NAMESPACE = uuid.uuid5(uuid.NAMESPACE_URL, "cardioresp/session")


@dataclass(frozen=True)
class SessionConfig:
    sample_rate: float = config.SAMPLE_RATE
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    scenario_digest: Optional[str] = None
    link_seed: Optional[int] = None
    gap_fill_max_frames: int = config.GAP_FILL_MAX_FRAMES

    def __post_init__(self) -> None:
        if not self.sample_rate > 0:
            raise ParameterError(f"sample_rate must be > 0, got {self.sample_rate}")
        if self.gap_fill_max_frames < 0:
            raise ParameterError("gap_fill_max_frames must be >= 0")

    @property
    def session_id(self) -> str:
        key = f"{self.scenario_digest}|{self.pipeline.digest()}|{self.link_seed}|{self.sample_rate!r}"
        return str(uuid.uuid5(SESSION_NAMESPACE, key))


@dataclass
class _Segment:
    start_index: int
    rows: list[np.ndarray] = field(default_factory=list)
    length: int = 0

    @property
    def end_index(self) -> int:
        return self.start_index + self.length

    def append(self, block: np.ndarray) -> None:
        self.rows.append(block)
        self.length += len(block)

    def last_row(self) -> np.ndarray:
        return self.rows[-1][-1]

    def to_trace(self, sample_rate: float) -> AccelTrace:
        data = np.vstack(self.rows)
        return AccelTrace(self.start_index / sample_rate, sample_rate, *data.T)


def _frame_rows(frame: SensorFrame, sample_rate: float) -> np.ndarray:
    """(n, 5) array of ax, ay, az, temp, pressure in SI units."""
    rows = np.array(
        [[s.ax, s.ay, s.az, s.skin_temp, s.pressure] for s in samples_to_si(frame, sample_rate)], dtype=float
    )
    rows[rows[:, 4] <= 0, 4] = np.nan  # pressure 0 carries no reading
    return rows


def _interpolate(last: np.ndarray, nxt: np.ndarray, missing: int) -> np.ndarray:
    fractions = np.arange(1, missing + 1) / (missing + 1)
    return last[None, :] + fractions[:, None] * (nxt - last)[None, :]


def reconstruct_timeline(
    frames: Iterable[SensorFrame], sample_rate: float, gap_fill_max_frames: int, stats: LinkStats
) -> list[AccelTrace]:
    """Order frames on the sample grid, bridging short gaps and splitting at long ones.

    Sample i of a frame sits at index round(t0 * fs / 1000) + i.
    """
    segments: list[_Segment] = []
    prev_seq = SEQ_MODULUS - 1
    for frame in frames:
        missing_frames = track_sequence(stats, prev_seq, frame.seq)
        prev_seq = frame.seq
        rows = _frame_rows(frame, sample_rate)
        index = int(round(frame.t0 * sample_rate / 1000.0))
        current = segments[-1] if segments else None
        if current is not None:
            gap = index - current.end_index
            if gap < 0:
                logger.warning("Dropping frame seq=%d: overlaps the timeline by %d samples", frame.seq, -gap)
                continue
            if gap == 0:
                current.append(rows)
                continue
            if missing_frames <= gap_fill_max_frames:
                logger.debug("Interpolating %d samples (%d frames) before seq=%d", gap, missing_frames, frame.seq)
                current.append(_interpolate(current.last_row(), rows[0], gap))
                current.append(rows)
                continue
            logger.warning("Gap of %d frames before seq=%d: starting a new segment", missing_frames, frame.seq)
        segment = _Segment(start_index=index)
        segment.append(rows)
        segments.append(segment)
    return [s.to_trace(sample_rate) for s in segments]


def scan_stream(chunks: Iterable[bytes], stats: LinkStats) -> list[SensorFrame]:
    scanner = FrameScanner(stats)
    frames: list[SensorFrame] = []
    for chunk in chunks:
        frames.extend(scanner.feed(chunk))
    frames.extend(scanner.close())
    logger.info(
        "Decoded %d frames (%d CRC rejected, %d malformed)",
        stats.frames_ok,
        stats.frames_crc_rejected,
        stats.frames_malformed,
    )
    return frames


def replay_capture(
    capture: bytes, sample_rate: float, gap_fill_max_frames: int = config.GAP_FILL_MAX_FRAMES
) -> LinkStats:
    """Link counters recomputed from a saved raw stream."""
    stats = LinkStats()
    reconstruct_timeline(scan_stream([capture], stats), sample_rate, gap_fill_max_frames, stats)
    return stats


def central_node_run(
    stream: bytes | Iterable[bytes],
    session: SessionConfig,
    out_dir: Optional[Path] = None,
    capture: bool = False,
) -> SessionRecord:
    """Decode a byte stream and analyse every segment long enough for a window.

    With ``out_dir`` the session is persisted there (and the raw stream as
    capture.bin when ``capture`` is set).
    """
    chunks = [stream] if isinstance(stream, (bytes, bytearray)) else list(stream)
    stats = LinkStats()
    frames = scan_stream(chunks, stats)

    fs = session.sample_rate
    traces = reconstruct_timeline(frames, fs, session.gap_fill_max_frames, stats)
    reports = []
    for trace in traces:
        if trace.duration + 1e-9 < session.pipeline.window:
            logger.warning(
                "Skipping %.3g s segment at t=%.3f s: shorter than one window", trace.duration, trace.t0
            )
            continue
        _, segment_reports = run_pipeline(trace, session.pipeline)
        reports.extend(segment_reports)
    if not frames:
        logger.warning("No frames were delivered; the session is empty")

    record = SessionRecord(
        session_id=session.session_id,
        scenario_digest=session.scenario_digest,
        config_digest=session.pipeline.digest(),
        start_time=traces[0].t0 if traces else None,
        sample_rate=fs,
        link_stats=stats,
        reports=reports,
        segments=[(t.t0, t.t0 + t.duration) for t in traces],
        link_seed=session.link_seed,
        traces=traces,
    )
    for alert in record.alerts:
        logger.warning(
            "Alert: window %.2f-%.2f s HRR=%s %s",
            alert["window_start"],
            alert["window_end"],
            alert["hrr"],
            alert["status"],
        )
    if out_dir is not None:
        raw = b"".join(bytes(c) for c in chunks) if capture else None
        SessionStore(out_dir).save(record, capture=raw)
    return record
