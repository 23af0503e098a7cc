"""Scenario parameters for the chest-motion simulator and their file format."""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import config
from errors import ConfigFileError, ParameterError

_EPS = 1e-9


class EventKind(str, Enum):
    HEART_BEAT = "heart_beat"
    BREATH = "breath"
    COUGH = "cough"
    BREATH_HOLD = "breath_hold"


SCHEDULED_KINDS = (EventKind.COUGH, EventKind.BREATH_HOLD)


@dataclass(frozen=True)
class EventMark:
    """A ground-truth or detected event. Point events have duration 0."""

    kind: EventKind
    start: float
    duration: float = 0.0

    @property
    def end(self) -> float:
        return self.start + self.duration

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "start": self.start, "duration": self.duration}

    @classmethod
    def from_value(cls, value: Any) -> "EventMark":
        """Build from a mapping or a ``[kind, start, duration]`` sequence."""
        if isinstance(value, EventMark):
            return value
        if isinstance(value, Mapping):
            kind, start, duration = value.get("kind"), value.get("start"), value.get("duration", 0.0)
        elif isinstance(value, (list, tuple)) and len(value) in (2, 3):
            kind, start = value[0], value[1]
            duration = value[2] if len(value) == 3 else 0.0
        else:
            raise ParameterError(f"event must be a table or [kind, start, duration], got {value!r}")
        try:
            return cls(kind=EventKind(kind), start=float(start), duration=float(duration))
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"invalid event {value!r}: {exc}") from exc


@dataclass(frozen=True)
class PhysioScenario:
    """Generator parameters: D(t) = c1 * D_L(t) + c2 * D_H(t).

    Rates are in Hz, amplitudes in metres, times in seconds. ``heart_onset``
    is the centre of the first heart impulse (default: half a beat period).
    ``resp_phase`` is the respiration phase at t = 0, in cycles.
    """

    duration: float
    sample_rate: float = config.SAMPLE_RATE
    resp_rate: float = 0.25
    resp_amplitude: float = 0.01
    resp_phase: float = 0.0
    heart_rate: float = 1.2
    heart_impulse_amplitude: float = 0.004
    heart_impulse_width: float = 0.15
    heart_onset: float | None = None
    c1: float = config.C1
    c2: float = config.C2
    orientation: tuple[float, float, float] = (0.0, 0.0, 1.0)
    gravity_included: bool = True
    noise_std: float = 0.0
    events: tuple[EventMark, ...] = field(default_factory=tuple)
    skin_temp: float = 34.0
    skin_temp_end: float | None = None
    ambient_pressure: float = config.SEA_LEVEL_PRESSURE
    cough_gain: float = config.COUGH_GAIN
    cough_width: float = config.COUGH_WIDTH

    def __post_init__(self) -> None:
        object.__setattr__(self, "orientation", tuple(float(v) for v in self.orientation))
        object.__setattr__(
            self, "events", tuple(sorted((EventMark.from_value(e) for e in self.events), key=_event_order))
        )
        self.validate()

    def validate(self) -> None:
        """Raise ParameterError naming the first violated invariant."""
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, float) and not math.isfinite(value):
                raise ParameterError(f"{f.name} must be finite, got {value}")
        if self.duration <= 0:
            raise ParameterError(f"duration must be > 0, got {self.duration}")
        if self.sample_rate <= 0:
            raise ParameterError(f"sample_rate must be > 0, got {self.sample_rate}")
        for name in ("resp_rate", "resp_amplitude", "heart_rate", "heart_impulse_amplitude", "noise_std"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.heart_impulse_width <= 0:
            raise ParameterError(f"heart_impulse_width must be > 0, got {self.heart_impulse_width}")
        if self.heart_rate > 0 and self.heart_impulse_width * self.heart_rate >= 1:
            raise ParameterError(
                "heart_impulse_width * heart_rate must be < 1 (impulses must not overlap), "
                f"got {self.heart_impulse_width * self.heart_rate:.6g}"
            )
        if self.heart_onset is not None and self.heart_onset < 0:
            raise ParameterError(f"heart_onset must be >= 0, got {self.heart_onset}")
        if self.cough_width <= 0 or self.cough_gain < 0:
            raise ParameterError("cough_width must be > 0 and cough_gain >= 0")
        if len(self.orientation) != 3:
            raise ParameterError("orientation must be a 3-vector")
        norm = math.sqrt(sum(v * v for v in self.orientation))
        if abs(norm - 1.0) > 1e-9:
            raise ParameterError(f"orientation must have unit norm within 1e-9, got norm {norm:.12g}")
        if self.ambient_pressure <= 0:
            raise ParameterError(f"ambient_pressure must be > 0, got {self.ambient_pressure}")
        self._validate_events()

    def _validate_events(self) -> None:
        last_end: dict[EventKind, float] = {}
        for event in self.events:
            if event.kind not in SCHEDULED_KINDS:
                raise ParameterError(f"scheduled events must be cough or breath_hold, got {event.kind.value}")
            if event.start < 0 or event.duration < 0:
                raise ParameterError(f"event start and duration must be >= 0: {event}")
            if event.end > self.duration + _EPS:
                raise ParameterError(
                    f"event {event.kind.value} at {event.start} ends at {event.end}, "
                    f"beyond scenario duration {self.duration}"
                )
            previous = last_end.get(event.kind)
            if previous is not None and (event.start < previous or (event.duration == 0 and event.start == previous)):
                raise ParameterError(f"{event.kind.value} events overlap at t={event.start}")
            last_end[event.kind] = event.end

    @property
    def n_samples(self) -> int:
        return int(round(self.duration * self.sample_rate))

    @property
    def first_heart_center(self) -> float:
        if self.heart_onset is not None:
            return self.heart_onset
        return 0.5 / self.heart_rate if self.heart_rate > 0 else 0.0

    @property
    def holds(self) -> list[tuple[float, float]]:
        return [(e.start, e.end) for e in self.events if e.kind is EventKind.BREATH_HOLD and e.duration > 0]

    @property
    def coughs(self) -> list[EventMark]:
        return [e for e in self.events if e.kind is EventKind.COUGH]

    def with_changes(self, **changes: Any) -> "PhysioScenario":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data["orientation"] = list(self.orientation)
        data["events"] = [e.to_dict() for e in self.events]
        return data

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "PhysioScenario":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ParameterError(f"unknown scenario key '{unknown[0]}'")
        if "duration" not in data:
            raise ParameterError("missing required key 'duration'")
        kwargs = dict(data)
        if "events" in kwargs:
            kwargs["events"] = tuple(EventMark.from_value(e) for e in kwargs["events"])
        if "orientation" in kwargs:
            kwargs["orientation"] = tuple(kwargs["orientation"])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ParameterError(str(exc)) from exc


def _event_order(event: EventMark) -> tuple[float, str]:
    return (event.start, event.kind.value)


_LINE_RE = re.compile(r"line (\d+)")


def read_document(path: Path | str) -> tuple[dict, str]:
    """Parse a flat TOML document. Returns (data, raw text)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigFileError(path, f"cannot read file: {exc.strerror or exc}") from exc
    try:
        return tomllib.loads(text), text
    except tomllib.TOMLDecodeError as exc:
        match = _LINE_RE.search(str(exc))
        raise ConfigFileError(path, str(exc), line=int(match.group(1)) if match else None) from exc


def line_of_key(text: str, message: str) -> int | None:
    """Best-effort line number of the key quoted in an error message."""
    match = re.search(r"'(\w+)'", message)
    candidates: Iterable[str] = [match.group(1)] if match else []
    candidates = list(candidates) + [w for w in re.findall(r"\b[a-z_]{3,}\b", message)]
    for key in candidates:
        for number, line in enumerate(text.splitlines(), start=1):
            if re.match(rf"\s*{re.escape(key)}\s*=", line):
                return number
    return None


def load_scenario(path: Path | str) -> PhysioScenario:
    data, text = read_document(path)
    try:
        return PhysioScenario.from_mapping(data)
    except ParameterError as exc:
        raise ConfigFileError(path, str(exc), line=line_of_key(text, str(exc))) from exc
