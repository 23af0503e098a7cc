"""Windowed vital-sign counting, HRR classification and context annotation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Real
from typing import Any, Mapping, Optional, Sequence

import numpy as np

import config
from errors import DataError, OutOfRangeError, ParameterError

# T0 / L and R * L / (g * M) of the international standard atmosphere
_BARO_SCALE = 288.15 / 0.0065
_BARO_EXPONENT = 0.190263


class HrrStatus(str, Enum):
    HEALTHY_RANGE = "healthy_range"
    OUT_OF_RANGE = "out_of_range"
    INDETERMINATE = "indeterminate"


class ActivityLevel(str, Enum):
    REST = "rest"
    LIGHT = "light"
    VIGOROUS = "vigorous"


def classify_hrr(hrr: Optional[Real]) -> HrrStatus:
    """healthy_range on the closed interval [HRR_LOW, HRR_HIGH]."""
    if hrr is None:
        return HrrStatus.INDETERMINATE
    if isinstance(hrr, float) and math.isnan(hrr):
        return HrrStatus.INDETERMINATE
    if config.HRR_LOW <= hrr <= config.HRR_HIGH:
        return HrrStatus.HEALTHY_RANGE
    return HrrStatus.OUT_OF_RANGE


def altitude_from_pressure(pressure: float, sea_level_ref: float = config.SEA_LEVEL_PRESSURE) -> float:
    """Altitude in metres from the international barometric formula."""
    if not (math.isfinite(pressure) and math.isfinite(sea_level_ref)):
        raise ParameterError("pressure and sea-level reference must be finite")
    if sea_level_ref <= 0:
        raise ParameterError(f"sea-level reference must be > 0 Pa, got {sea_level_ref}")
    if pressure <= 0:
        raise ParameterError(f"pressure must be > 0 Pa, got {pressure}")
    if pressure > 1.1 * sea_level_ref:
        raise OutOfRangeError(f"pressure {pressure} Pa exceeds 1.1 x sea-level reference {sea_level_ref} Pa")
    return _BARO_SCALE * (1.0 - (pressure / sea_level_ref) ** _BARO_EXPONENT)


def classify_activity(
    rms: Optional[float],
    light: float = config.ACTIVITY_LIGHT_RMS,
    vigorous: float = config.ACTIVITY_VIGOROUS_RMS,
) -> Optional[ActivityLevel]:
    if rms is None:
        return None
    if rms >= vigorous:
        return ActivityLevel.VIGOROUS
    if rms >= light:
        return ActivityLevel.LIGHT
    return ActivityLevel.REST


def _increasing(name: str, values: Sequence[float]) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if any(b <= a for a, b in zip(out, out[1:])):
        raise DataError(f"{name} must be strictly increasing")
    return out


@dataclass(frozen=True)
class DetectedEvents:
    """Event times in seconds, each list strictly increasing."""

    beats: tuple[float, ...] = ()
    breaths: tuple[float, ...] = ()
    coughs: tuple[float, ...] = ()
    breath_troughs: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        for name in ("beats", "breaths", "coughs", "breath_troughs"):
            object.__setattr__(self, name, _increasing(name, getattr(self, name)))

    def to_records(self) -> list[dict]:
        """One ``{"kind", "t"}`` record per event, ordered by time."""
        records = [{"kind": "heart_beat", "t": t} for t in self.beats]
        records += [{"kind": "breath", "t": t} for t in self.breaths]
        records += [{"kind": "cough", "t": t} for t in self.coughs]
        return sorted(records, key=lambda r: (r["t"], r["kind"]))


@dataclass(frozen=True)
class WindowContext:
    """Per-window context readings; None where the channel is missing."""

    skin_temp: Optional[float] = None
    ambient_pressure: Optional[float] = None
    activity_rms: Optional[float] = None
    sea_level_pressure: float = config.SEA_LEVEL_PRESSURE
    activity_light_rms: float = config.ACTIVITY_LIGHT_RMS
    activity_vigorous_rms: float = config.ACTIVITY_VIGOROUS_RMS


@dataclass(frozen=True)
class VitalsReport:
    window_start: float
    window_end: float
    hr_count: int
    rr_count: int
    hr_per_min: float
    rr_per_min: float
    hrr: Optional[Fraction]
    status: HrrStatus
    skin_temp: Optional[float] = None
    ambient_pressure: Optional[float] = None
    altitude: Optional[float] = None
    cough_count: int = 0
    inhale_duration: Optional[float] = None
    exhale_duration: Optional[float] = None
    activity_rms: Optional[float] = None
    activity: Optional[ActivityLevel] = None

    @property
    def hrr_label(self) -> str:
        if self.hrr is None:
            return "undefined"
        if self.hrr.denominator == 1:
            return str(self.hrr.numerator)
        return f"{float(self.hrr):.4g}"

    def summary_line(self) -> str:
        return (
            f"[{self.window_start:.2f}-{self.window_end:.2f}] HR={self.hr_count} RR={self.rr_count} "
            f"HRR={self.hrr_label} {self.status.value}"
        )

    def to_dict(self) -> dict:
        return {
            "window_start": self.window_start,
            "window_end": self.window_end,
            "hr_count": self.hr_count,
            "rr_count": self.rr_count,
            "hr_per_min": self.hr_per_min,
            "rr_per_min": self.rr_per_min,
            "hrr": "undefined" if self.hrr is None else float(self.hrr),
            "status": self.status.value,
            "skin_temp": self.skin_temp,
            "ambient_pressure": self.ambient_pressure,
            "altitude": self.altitude,
            "cough_count": self.cough_count,
            "inhale_duration": self.inhale_duration,
            "exhale_duration": self.exhale_duration,
            "activity_rms": self.activity_rms,
            "activity": self.activity.value if self.activity else None,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "VitalsReport":
        """Inverse of to_dict; hrr is rebuilt exactly from the counts."""
        try:
            hr, rr = int(data["hr_count"]), int(data["rr_count"])
            activity = data.get("activity")
            return cls(
                window_start=float(data["window_start"]),
                window_end=float(data["window_end"]),
                hr_count=hr,
                rr_count=rr,
                hr_per_min=float(data["hr_per_min"]),
                rr_per_min=float(data["rr_per_min"]),
                hrr=Fraction(hr, rr) if rr > 0 else None,
                status=HrrStatus(data["status"]),
                skin_temp=data.get("skin_temp"),
                ambient_pressure=data.get("ambient_pressure"),
                altitude=data.get("altitude"),
                cough_count=int(data.get("cough_count", 0)),
                inhale_duration=data.get("inhale_duration"),
                exhale_duration=data.get("exhale_duration"),
                activity_rms=data.get("activity_rms"),
                activity=ActivityLevel(activity) if activity else None,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed vitals report: {exc}") from exc


def _in_window(times: Sequence[float], start: float, end: float) -> list[float]:
    return [t for t in times if start <= t < end]


def breath_phases(
    peaks: Sequence[float], troughs: Sequence[float], start: float, end: float
) -> tuple[Optional[float], Optional[float]]:
    """Mean inhalation (trough to next peak) and exhalation (peak to next trough)."""
    peaks, troughs = _in_window(peaks, start, end), _in_window(troughs, start, end)
    marks = sorted([(t, "peak") for t in peaks] + [(t, "trough") for t in troughs])
    inhale, exhale = [], []
    for (t_a, kind_a), (t_b, kind_b) in zip(marks, marks[1:]):
        if kind_a == "trough" and kind_b == "peak":
            inhale.append(t_b - t_a)
        elif kind_a == "peak" and kind_b == "trough":
            exhale.append(t_b - t_a)
    return (float(np.mean(inhale)) if inhale else None, float(np.mean(exhale)) if exhale else None)


def count_vitals(
    events: DetectedEvents,
    window_start: float,
    window_end: float,
    context: Optional[WindowContext] = None,
) -> VitalsReport:
    """HR/RR counts over [window_start, window_end) and the derived HRR."""
    if not window_end > window_start:
        raise ParameterError(f"window_end {window_end} must be > window_start {window_start}")
    context = context or WindowContext()
    hr = len(_in_window(events.beats, window_start, window_end))
    rr = len(_in_window(events.breaths, window_start, window_end))
    minutes = (window_end - window_start) / 60.0
    hrr = Fraction(hr, rr) if rr > 0 else None
    inhale, exhale = breath_phases(events.breaths, events.breath_troughs, window_start, window_end)
    altitude = None
    if context.ambient_pressure is not None:
        altitude = altitude_from_pressure(context.ambient_pressure, context.sea_level_pressure)
    return VitalsReport(
        window_start=window_start,
        window_end=window_end,
        hr_count=hr,
        rr_count=rr,
        hr_per_min=hr / minutes,
        rr_per_min=rr / minutes,
        hrr=hrr,
        status=classify_hrr(hrr),
        skin_temp=context.skin_temp,
        ambient_pressure=context.ambient_pressure,
        altitude=altitude,
        cough_count=len(_in_window(events.coughs, window_start, window_end)),
        inhale_duration=inhale,
        exhale_duration=exhale,
        activity_rms=context.activity_rms,
        activity=classify_activity(context.activity_rms, context.activity_light_rms, context.activity_vigorous_rms),
    )
