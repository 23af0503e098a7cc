"""Accelerometer samples, uniformly sampled traces, and the trace CSV format."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence, overload

import numpy as np

from errors import DataError, InsufficientDataError, ParameterError

CSV_HEADER = ["t", "ax", "ay", "az", "temp", "pressure"]


@dataclass(frozen=True)
class AccelSample:
    t: float
    ax: float
    ay: float
    az: float
    skin_temp: Optional[float] = None
    pressure: Optional[float] = None


def _frozen(values: Sequence[float] | np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


class AccelTrace:
    """Tri-axial trace on the grid t0 + i / sample_rate.

    Backed by read-only numpy arrays; iterating yields AccelSample values.
    Context channels (skin temperature, pressure) are optional and hold NaN
    where a reading is missing.
    """

    def __init__(
        self,
        t0: float,
        sample_rate: float,
        ax: Sequence[float] | np.ndarray,
        ay: Sequence[float] | np.ndarray,
        az: Sequence[float] | np.ndarray,
        skin_temp: Sequence[float] | np.ndarray | None = None,
        pressure: Sequence[float] | np.ndarray | None = None,
    ):
        if not sample_rate > 0:
            raise ParameterError(f"sample_rate must be > 0, got {sample_rate}")
        self.t0 = float(t0)
        self.sample_rate = float(sample_rate)
        self.ax, self.ay, self.az = _frozen(ax), _frozen(ay), _frozen(az)
        n = self.ax.size
        if self.ay.size != n or self.az.size != n:
            raise DataError("ax, ay and az must have equal length")
        self.skin_temp = _frozen(skin_temp) if skin_temp is not None else _frozen(np.full(n, np.nan))
        self.pressure = _frozen(pressure) if pressure is not None else _frozen(np.full(n, np.nan))
        if self.skin_temp.size != n or self.pressure.size != n:
            raise DataError("context channels must match the acceleration length")

    @property
    def period(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def t(self) -> np.ndarray:
        return self.t0 + np.arange(len(self)) / self.sample_rate

    @property
    def end_time(self) -> float:
        """Time of the last sample."""
        return self.t0 + (len(self) - 1) / self.sample_rate

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate

    def xyz(self) -> np.ndarray:
        return np.column_stack([self.ax, self.ay, self.az])

    def __len__(self) -> int:
        return int(self.ax.size)

    @overload
    def __getitem__(self, index: int) -> AccelSample: ...

    @overload
    def __getitem__(self, index: slice) -> "AccelTrace": ...

    def __getitem__(self, index):
        if isinstance(index, slice):
            start, stop, step = index.indices(len(self))
            if step != 1:
                raise ParameterError("trace slices must be contiguous")
            return AccelTrace(
                self.t0 + start / self.sample_rate,
                self.sample_rate,
                self.ax[start:stop],
                self.ay[start:stop],
                self.az[start:stop],
                self.skin_temp[start:stop],
                self.pressure[start:stop],
            )
        i = range(len(self))[index]
        return AccelSample(
            t=self.t0 + i / self.sample_rate,
            ax=float(self.ax[i]),
            ay=float(self.ay[i]),
            az=float(self.az[i]),
            skin_temp=_optional(self.skin_temp[i]),
            pressure=_optional(self.pressure[i]),
        )

    def __iter__(self) -> Iterator[AccelSample]:
        for i in range(len(self)):
            yield self[i]

    @classmethod
    def from_samples(cls, samples: Iterable[AccelSample], sample_rate: float | None = None) -> "AccelTrace":
        """Build a trace from samples, checking the uniform-spacing invariant."""
        items = list(samples)
        if not items:
            raise InsufficientDataError("a trace needs at least one sample")
        t = np.array([s.t for s in items], dtype=float)
        if sample_rate is None:
            if t.size < 2:
                raise ParameterError("sample_rate is required for a single-sample trace")
            sample_rate = (t.size - 1) / (t[-1] - t[0])
        expected = t[0] + np.arange(t.size) / sample_rate
        if np.any(np.abs(t - expected) > 1e-9):
            raise DataError("samples are not uniformly spaced at 1/sample_rate")
        return cls(
            t[0],
            sample_rate,
            [s.ax for s in items],
            [s.ay for s in items],
            [s.az for s in items],
            [np.nan if s.skin_temp is None else s.skin_temp for s in items],
            [np.nan if s.pressure is None else s.pressure for s in items],
        )

    def to_csv(self, path: Path | str) -> None:
        """Write ``t,ax,ay,az,temp,pressure`` with 9 significant digits."""
        write_csv([self], path)

    @classmethod
    def from_csv(cls, path: Path | str) -> "AccelTrace":
        path = Path(path)
        try:
            with path.open("r", encoding="utf-8", newline="") as fh:
                rows = list(csv.reader(fh))
        except OSError as exc:
            raise DataError(f"{path}: cannot read trace: {exc.strerror or exc}") from exc
        if not rows or [c.strip() for c in rows[0]] != CSV_HEADER:
            raise DataError(f"{path}: header must be {','.join(CSV_HEADER)}")
        body = [r for r in rows[1:] if r]
        if not body:
            raise InsufficientDataError(f"{path}: trace has no samples")
        try:
            cols = [[_parse(r[j]) for r in body] for j in range(len(CSV_HEADER))]
        except (IndexError, ValueError) as exc:
            raise DataError(f"{path}: malformed row: {exc}") from exc
        t = np.array(cols[0], dtype=float)
        accel = np.array(cols[1:4], dtype=float)
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(accel))):
            raise DataError(f"{path}: t, ax, ay and az must be finite numbers")
        if t.size == 1:
            raise InsufficientDataError(f"{path}: at least two samples are needed to infer the sample rate")
        step = np.diff(t)
        if np.any(step <= 0):
            raise DataError(f"{path}: timestamps must be strictly increasing")
        sample_rate = float(f"{(t.size - 1) / (t[-1] - t[0]):.6g}")
        tolerance = 1e-6 + 1e-8 * abs(t[-1])
        if np.any(np.abs(t - (t[0] + np.arange(t.size) / sample_rate)) > tolerance):
            raise DataError(f"{path}: samples are not uniformly spaced")
        return cls(t[0], sample_rate, accel[0], accel[1], accel[2], cols[4], cols[5])


def _optional(value: float) -> Optional[float]:
    return None if math.isnan(value) else float(value)


def _fmt(value: float) -> str:
    return "" if math.isnan(value) else f"{value:.9g}"


def _parse(field: str) -> float:
    field = field.strip()
    return float("nan") if field == "" else float(field)


def write_csv(traces: Iterable[AccelTrace], path: Path | str) -> None:
    """Write one or more traces, in order, under a single header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for trace in traces:
            columns = (trace.t, trace.ax, trace.ay, trace.az, trace.skin_temp, trace.pressure)
            for row in zip(*columns):
                writer.writerow([_fmt(v) for v in row])
