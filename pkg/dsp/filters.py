"""Front half of the inverse chain: magnitude, gravity removal, double
integration and zero-phase band separation.

All functions take and return plain numpy arrays (or an AccelTrace on the
way in) and never mutate their inputs.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np
from scipy import signal
from scipy.integrate import cumulative_trapezoid
from scipy.ndimage import uniform_filter1d

from errors import DataError, InsufficientDataError, ParameterError
from signal_model.trace import AccelSample, AccelTrace

from .settings import PipelineConfig


def magnitude(sample: AccelSample) -> float:
    """Euclidean norm of one tri-axial reading."""
    values = (sample.ax, sample.ay, sample.az)
    if not all(math.isfinite(v) for v in values):
        raise DataError(f"non-finite acceleration at t={sample.t}")
    return math.hypot(*values)


def magnitudes(trace: AccelTrace) -> np.ndarray:
    xyz = trace.xyz()
    if not np.all(np.isfinite(xyz)):
        raise DataError("trace contains non-finite acceleration values")
    return np.linalg.norm(xyz, axis=1)


def as_trace(samples: AccelTrace | Iterable[AccelSample], sample_rate: float | None = None) -> AccelTrace:
    if isinstance(samples, AccelTrace):
        return samples
    return AccelTrace.from_samples(samples, sample_rate)


def odd_window(seconds: float, fs: float) -> int:
    """Odd sample count closest to ``seconds`` at ``fs`` (at least 1)."""
    size = max(1, int(round(seconds * fs)))
    return size if size % 2 else size + 1


def moving_mean(x: np.ndarray, size: int) -> np.ndarray:
    """Centred moving mean with odd-symmetric reflection at both ends.

    Constant and linear series pass through unchanged.
    """
    x = np.asarray(x, dtype=float)
    half = size // 2
    if half == 0:
        return x.copy()
    if x.size <= half:
        raise InsufficientDataError(f"series of {x.size} samples is shorter than a {size}-sample moving mean")
    padded = np.pad(x, half, mode="reflect", reflect_type="odd")
    return uniform_filter1d(padded, size=size, mode="nearest")[half:-half]


def signed_magnitudes(trace: AccelTrace, size: int) -> np.ndarray:
    """Per-sample magnitude, negated where the reading points against the
    local gravity direction (the per-axis centred moving mean).

    A dynamic pulse stronger than gravity and opposite to it therefore keeps
    its sign instead of folding back through zero.
    """
    total = magnitudes(trace)
    xyz = trace.xyz()
    local = np.column_stack([moving_mean(xyz[:, axis], size) for axis in range(3)])
    against = np.einsum("ij,ij->i", xyz, local) < 0
    return np.where(against, -total, total)


def remove_gravity(trace: AccelTrace | Iterable[AccelSample], cfg: PipelineConfig) -> np.ndarray:
    """Dynamic a_Total: signed per-sample magnitude minus its centred moving mean."""
    trace = as_trace(trace)
    size = odd_window(cfg.gravity_window, trace.sample_rate)
    if len(trace) < size:
        raise InsufficientDataError(
            f"trace of {len(trace)} samples is shorter than gravity_window ({size} samples)"
        )
    total = signed_magnitudes(trace, size)
    return total - moving_mean(total, size)


def _remove_drift(x: np.ndarray, fs: float, mode: str, stage: int, window: float) -> np.ndarray:
    if mode == "none" or x.size < 2:
        return x
    if mode == "moving_mean":
        size = min(odd_window(window, fs), x.size if x.size % 2 else x.size - 1)
        return x - moving_mean(x, size)
    # linear: velocity loses its mean, displacement its least-squares line
    return signal.detrend(x, type="constant" if stage == 1 else "linear")


def integrate_twice(
    a: np.ndarray, fs: float, cfg: PipelineConfig | None = None, drift_mode: str | None = None
) -> np.ndarray:
    """Displacement from acceleration by two cumulative trapezoid stages.

    ``drift_mode`` overrides ``cfg.drift_mode``; pass ``"none"`` for the raw
    kinematic result starting from rest at the origin.
    """
    if not fs > 0:
        raise ParameterError(f"sample rate must be > 0, got {fs}")
    cfg = cfg or PipelineConfig()
    mode = drift_mode or cfg.drift_mode
    if mode not in ("linear", "moving_mean", "none"):
        raise ParameterError(f"unknown drift_mode {mode!r}")
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return a.copy()
    dt = 1.0 / fs
    velocity = cumulative_trapezoid(a, dx=dt, initial=0.0)
    velocity = _remove_drift(velocity, fs, mode, 1, cfg.integration_detrend_window)
    displacement = cumulative_trapezoid(velocity, dx=dt, initial=0.0)
    return _remove_drift(displacement, fs, mode, 2, cfg.integration_detrend_window)


def _zero_phase(sos: np.ndarray, x: np.ndarray, memory_samples: int) -> np.ndarray:
    padlen = min(x.size - 1, 3 * memory_samples)
    return signal.sosfiltfilt(sos, x, padtype="odd", padlen=padlen)


def separate_bands(d: np.ndarray, fs: float, cfg: PipelineConfig) -> tuple[np.ndarray, np.ndarray]:
    """Split displacement into (respiration, heart) with zero-phase Butterworth filters."""
    if not fs > 0:
        raise ParameterError(f"sample rate must be > 0, got {fs}")
    cfg.check_band_limits(fs)
    d = np.asarray(d, dtype=float)
    memory = int(math.ceil(cfg.longest_memory * fs))
    if d.size < 4 * memory:
        raise InsufficientDataError(
            f"series of {d.size} samples is shorter than 4 filter memories ({4 * memory} samples)"
        )
    resp_sos = signal.butter(cfg.filter_order, cfg.resp_cutoff, btype="lowpass", fs=fs, output="sos")
    heart_sos = signal.butter(cfg.filter_order, list(cfg.heart_band), btype="bandpass", fs=fs, output="sos")
    return _zero_phase(resp_sos, d, memory), _zero_phase(heart_sos, d, memory)


BEAT_EMPHASIS_ORDER = 2


def emphasize_beats(heart: np.ndarray, fs: float, cfg: PipelineConfig) -> np.ndarray:
    """Heart band with everything below ``beat_highpass`` removed.

    A ``beat_highpass`` at or below the heart band's low edge returns the band
    unchanged.
    """
    heart = np.asarray(heart, dtype=float)
    if cfg.beat_highpass <= cfg.heart_band[0]:
        return heart.copy()
    sos = signal.butter(BEAT_EMPHASIS_ORDER, cfg.beat_highpass, btype="highpass", fs=fs, output="sos")
    return _zero_phase(sos, heart, int(math.ceil(fs / cfg.beat_highpass)))
