"""End-to-end inverse chain from an accelerometer trace to per-window vitals."""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from errors import DataError, InsufficientDataError
from signal_model.trace import AccelSample, AccelTrace

from .filters import as_trace, emphasize_beats, integrate_twice, remove_gravity, separate_bands
from .peaks import beats_hidden_by_coughs, cough_mask, detect_cough, detect_peaks
from .settings import PipelineConfig
from .vitals import DetectedEvents, VitalsReport, WindowContext, count_vitals

logger = logging.getLogger(__name__)


def window_starts(t0: float, n_samples: int, sample_rate: float, window: float, hop: float) -> list[float]:
    """Window start times: first sample, then every hop while the window fits."""
    limit = t0 + n_samples / sample_rate + 1e-9
    starts = []
    k = 0
    while t0 + k * hop + window <= limit:
        starts.append(t0 + k * hop)
        k += 1
    return starts


def _channel_mean(values: np.ndarray) -> Optional[float]:
    finite = values[np.isfinite(values)]
    return float(finite.mean()) if finite.size else None


def detect_events(trace: AccelTrace, cfg: PipelineConfig) -> tuple[DetectedEvents, np.ndarray]:
    """Run the filter chain and detectors over the whole trace.

    Returns the events and the dynamic a_Total series they came from.
    """
    fs = trace.sample_rate
    cfg.check_band_limits(fs)
    dynamic = remove_gravity(trace, cfg)
    displacement = integrate_twice(dynamic, fs, cfg)
    resp, heart = separate_bands(displacement, fs, cfg)

    guard, t0 = cfg.edge_guard, trace.t0
    coughs = detect_cough(dynamic, fs, cfg, t0=t0)
    beat_series = emphasize_beats(heart, fs, cfg)
    masked = cough_mask(coughs, beat_series.size, fs, cfg.heart_refractory, t0=t0)
    beats = detect_peaks(
        beat_series,
        fs,
        cfg.heart_refractory,
        cfg.peak_threshold_k,
        edge_guard=guard,
        prominence_k=cfg.heart_prominence_k,
        relative_prominence=cfg.heart_relative_prominence,
        t0=t0,
        background_exclusion=cfg.heart_refractory / 2,
        exclude=masked,
    )
    if coughs:
        span = (t0 + guard, t0 + len(trace) / fs - guard)
        hidden = beats_hidden_by_coughs(beats, coughs, span)
        logger.debug("Masked %d coughs from beat detection, %d restored as beats", len(coughs), len(hidden))
        beats = sorted(beats + hidden)
    resp_args = (fs, cfg.resp_refractory, cfg.resp_threshold_k)
    breaths = detect_peaks(resp, *resp_args, edge_guard=guard, prominence_k=cfg.resp_prominence_k, t0=t0)
    troughs = detect_peaks(-resp, *resp_args, edge_guard=guard, prominence_k=cfg.resp_prominence_k, t0=t0)
    events = DetectedEvents(beats=beats, breaths=breaths, coughs=coughs, breath_troughs=troughs)
    return events, dynamic


def run_pipeline(
    trace: AccelTrace | Iterable[AccelSample], cfg: Optional[PipelineConfig] = None
) -> tuple[DetectedEvents, list[VitalsReport]]:
    """remove_gravity -> integrate_twice -> separate_bands -> detectors -> count_vitals per hop."""
    cfg = cfg or PipelineConfig()
    trace = as_trace(trace)
    fs = trace.sample_rate
    if len(trace) / fs + 1e-9 < cfg.window:
        raise InsufficientDataError(
            f"trace covers {len(trace) / fs:.6g} s, shorter than one {cfg.window:.6g} s window"
        )
    events, dynamic = detect_events(trace, cfg)

    reports = []
    span = int(round(cfg.window * fs))
    for start in window_starts(trace.t0, len(trace), fs, cfg.window, cfg.hop):
        i0 = int(round((start - trace.t0) * fs))
        i1 = min(len(trace), i0 + span)
        context = WindowContext(
            skin_temp=_channel_mean(trace.skin_temp[i0:i1]),
            ambient_pressure=_channel_mean(trace.pressure[i0:i1]),
            activity_rms=float(math.sqrt(np.mean(dynamic[i0:i1] ** 2))),
            sea_level_pressure=cfg.sea_level_pressure,
            activity_light_rms=cfg.activity_light_rms,
            activity_vigorous_rms=cfg.activity_vigorous_rms,
        )
        reports.append(count_vitals(events, start, start + cfg.window, context))

    logger.info(
        "Analysed %d samples: %d beats, %d breaths, %d coughs in %d windows",
        len(trace),
        len(events.beats),
        len(events.breaths),
        len(events.coughs),
        len(reports),
    )
    return events, reports


def reports_to_jsonl(reports: Iterable[VitalsReport]) -> str:
    return "".join(json.dumps(r.to_dict()) + "\n" for r in reports)


def write_reports(reports: Iterable[VitalsReport], path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(reports_to_jsonl(reports), encoding="utf-8")
    return path


def read_reports(path: Path | str) -> list[VitalsReport]:
    path = Path(path)
    reports = []
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            reports.append(VitalsReport.from_dict(json.loads(line)))
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{number}: invalid JSON: {exc.msg}") from exc
    return reports


def write_events(events: DetectedEvents, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(json.dumps(r) + "\n" for r in events.to_records()), encoding="utf-8")
    return path
