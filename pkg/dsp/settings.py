"""Pipeline configuration and its TOML file format."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

import config
from errors import ConfigFileError, ParameterError
from signal_model.scenario import line_of_key, read_document

DRIFT_MODES = ("linear", "moving_mean", "none")

_POSITIVE = (
    "gravity_window",
    "integration_detrend_window",
    "resp_cutoff",
    "heart_refractory",
    "resp_refractory",
    "cough_min_separation",
    "cough_reference_window",
    "window",
    "sea_level_pressure",
)
_NON_NEGATIVE = (
    "beat_highpass",
    "peak_threshold_k",
    "resp_threshold_k",
    "resp_prominence_k",
    "heart_prominence_k",
    "heart_relative_prominence",
    "cough_threshold_k",
    "cough_min_ratio",
    "activity_light_rms",
)


@dataclass(frozen=True)
class PipelineConfig:
    """Parameters of the inverse chain. Times in seconds, frequencies in Hz."""

    gravity_window: float = config.GRAVITY_WINDOW
    integration_detrend_window: float = config.INTEGRATION_DETREND_WINDOW
    drift_mode: str = config.DRIFT_MODE
    resp_cutoff: float = config.RESP_CUTOFF
    heart_band: tuple[float, float] = (config.HEART_BAND_LOW, config.HEART_BAND_HIGH)
    beat_highpass: float = config.BEAT_HIGHPASS
    filter_order: int = config.FILTER_ORDER
    heart_refractory: float = config.HEART_REFRACTORY
    resp_refractory: float = config.RESP_REFRACTORY
    peak_threshold_k: float = config.PEAK_THRESHOLD_K
    resp_threshold_k: float = config.RESP_THRESHOLD_K
    resp_prominence_k: float = config.RESP_PROMINENCE_K
    heart_prominence_k: float = config.HEART_PROMINENCE_K
    heart_relative_prominence: float = config.HEART_RELATIVE_PROMINENCE
    cough_threshold_k: float = config.COUGH_THRESHOLD_K
    cough_min_ratio: float = config.COUGH_MIN_RATIO
    cough_min_separation: float = config.COUGH_MIN_SEPARATION
    cough_reference_window: float = config.COUGH_REFERENCE_WINDOW
    window: float = config.VITALS_WINDOW
    hop: float | None = None
    sea_level_pressure: float = config.SEA_LEVEL_PRESSURE
    activity_light_rms: float = config.ACTIVITY_LIGHT_RMS
    activity_vigorous_rms: float = config.ACTIVITY_VIGOROUS_RMS

    def __post_init__(self) -> None:
        object.__setattr__(self, "heart_band", tuple(float(v) for v in self.heart_band))
        object.__setattr__(self, "drift_mode", str(self.drift_mode).lower())
        if self.hop is None:
            object.__setattr__(self, "hop", self.window)
        self.validate()

    def validate(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, float) and not math.isfinite(value):
                raise ParameterError(f"{f.name} must be finite, got {value}")
        for name in _POSITIVE:
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in _NON_NEGATIVE:
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0, got {getattr(self, name)}")
        if len(self.heart_band) != 2:
            raise ParameterError("heart_band must be a (low, high) pair")
        low, high = self.heart_band
        if not 0 < low < high:
            raise ParameterError(f"heart_band must satisfy 0 < low < high, got {self.heart_band}")
        if low < self.resp_cutoff:
            raise ParameterError(
                f"heart_band low edge {low} must be >= resp_cutoff {self.resp_cutoff}"
            )
        if self.beat_highpass >= high:
            raise ParameterError(f"beat_highpass {self.beat_highpass} must be below the heart_band high edge {high}")
        if self.filter_order < 1:
            raise ParameterError(f"filter_order must be >= 1, got {self.filter_order}")
        if self.drift_mode not in DRIFT_MODES:
            raise ParameterError(f"drift_mode must be one of {', '.join(DRIFT_MODES)}, got {self.drift_mode!r}")
        if not 0 < self.hop <= self.window:
            raise ParameterError(f"hop must satisfy 0 < hop <= window, got hop={self.hop} window={self.window}")
        if self.activity_vigorous_rms < self.activity_light_rms:
            raise ParameterError("activity_vigorous_rms must be >= activity_light_rms")

    @property
    def edge_guard(self) -> float:
        """Span at each end of a series excluded from event detection."""
        return self.integration_detrend_window / 2

    @property
    def longest_memory(self) -> float:
        return 1.0 / min(self.resp_cutoff, self.heart_band[0])

    def check_band_limits(self, sample_rate: float) -> None:
        """Band edges must sit below the Nyquist frequency of the trace."""
        nyquist = sample_rate / 2
        if self.heart_band[1] >= nyquist or self.resp_cutoff >= nyquist:
            raise ParameterError(
                f"heart_band high edge {self.heart_band[1]} Hz must be below Nyquist ({nyquist:.6g} Hz)"
            )

    def with_changes(self, **changes: Any) -> "PipelineConfig":
        if "window" in changes and "hop" not in changes and self.hop == self.window:
            changes["hop"] = None
        return replace(self, **changes)

    def to_dict(self) -> dict:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data["heart_band"] = list(self.heart_band)
        return data

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ParameterError(f"unknown pipeline config key '{unknown[0]}'")
        kwargs = dict(data)
        if "heart_band" in kwargs:
            kwargs["heart_band"] = tuple(kwargs["heart_band"])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ParameterError(str(exc)) from exc


def load_pipeline_config(path: Path | str | None) -> PipelineConfig:
    """Read a pipeline config file; ``None`` gives the defaults."""
    if path is None:
        return PipelineConfig()
    data, text = read_document(path)
    try:
        return PipelineConfig.from_mapping(data)
    except ParameterError as exc:
        raise ConfigFileError(path, str(exc), line=line_of_key(text, str(exc))) from exc
