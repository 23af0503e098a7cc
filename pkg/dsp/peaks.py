"""Beat, breath and cough detection on filtered series."""

from __future__ import annotations

import bisect
import logging
import math

import numpy as np
from scipy.signal import find_peaks
from scipy.stats import median_abs_deviation

from errors import DataError

from .settings import PipelineConfig

logger = logging.getLogger(__name__)


def _samples(seconds: float, fs: float) -> int:
    return max(1, int(math.ceil(seconds * fs - 1e-9)))


def robust_level(x: np.ndarray) -> tuple[float, float]:
    """(median, normal-consistent MAD) of a series."""
    if x.size == 0:
        return 0.0, 0.0
    return float(np.median(x)), float(median_abs_deviation(x, scale="normal"))


def detect_peaks(
    series: np.ndarray,
    fs: float,
    refractory: float,
    threshold_k: float,
    edge_guard: float = 0.0,
    prominence_k: float = 0.0,
    relative_prominence: float = 0.0,
    t0: float = 0.0,
    background_exclusion: float = 0.0,
    exclude: np.ndarray | None = None,
) -> list[float]:
    """Times of local maxima above median + threshold_k * MAD.

    Only peaks inside the span left after trimming ``edge_guard`` seconds at
    both ends, and outside the boolean ``exclude`` mask, are returned.
    Competing peaks closer than ``refractory`` are resolved in favour of the
    taller. A peak must also rise at least max(prominence_k * MAD,
    relative_prominence * largest candidate prominence) above its
    surroundings.

    Median and MAD come from the usable span. With ``background_exclusion``
    set, samples within that many seconds of a candidate passing the
    relative floor are left out too, so the statistics describe the floor
    between events rather than the events themselves.
    """
    x = np.asarray(series, dtype=float)
    if x.size < 3:
        return []
    if not np.all(np.isfinite(x)):
        raise DataError("cannot detect peaks in a series with non-finite values")
    guard = int(round(edge_guard * fs))
    usable = np.zeros(x.size, dtype=bool)
    usable[guard : x.size - guard] = True
    if exclude is not None:
        usable &= ~np.asarray(exclude, dtype=bool)
    if np.count_nonzero(usable) < 3 or np.ptp(x[usable]) == 0:
        return []

    peaks, props = find_peaks(x, distance=_samples(refractory, fs), prominence=0.0)
    keep = usable[peaks]
    peaks, prominences = peaks[keep], props["prominences"][keep]
    if peaks.size == 0:
        return []
    strong = prominences >= relative_prominence * prominences.max()

    background = usable
    if background_exclusion > 0:
        half = int(round(background_exclusion * fs))
        background = usable.copy()
        for i in peaks[strong]:
            background[max(0, i - half) : i + half + 1] = False
        if np.count_nonzero(background) < 3:
            background = usable
    median, mad = robust_level(x[background])

    passed = strong & (x[peaks] >= median + threshold_k * mad)
    floor = prominence_k * mad
    passed &= prominences >= floor if floor > 0 else prominences > 0
    return [t0 + int(i) / fs for i in peaks[passed]]


def cough_mask(coughs: list[float], size: int, fs: float, half_width: float, t0: float = 0.0) -> np.ndarray:
    """Boolean mask over ``size`` samples covering ``half_width`` seconds around each cough."""
    mask = np.zeros(size, dtype=bool)
    half = int(round(half_width * fs))
    for c in coughs:
        i = int(round((c - t0) * fs))
        mask[max(0, i - half) : max(0, i + half + 1)] = True
    return mask


def beats_hidden_by_coughs(
    beats: list[float], coughs: list[float], span: tuple[float, float], tolerance: float = 0.25
) -> list[float]:
    """Coughs that land where the beat rhythm expects a beat.

    The rhythm is the median interval of ``beats``. A cough inside ``span``
    counts as a hidden beat when its distance to each neighbouring beat is
    within ``tolerance`` intervals of a whole, non-zero number of intervals.
    """
    if len(beats) < 2:
        return []
    interval = float(np.median(np.diff(beats)))
    if not interval > 0:
        return []
    hidden = []
    for c in coughs:
        if not span[0] <= c < span[1]:
            continue
        i = bisect.bisect_left(beats, c)
        neighbours = beats[max(0, i - 1) : i + 1]
        cycles = [abs(c - b) / interval for b in neighbours]
        if cycles and all(round(k) >= 1 and abs(k - round(k)) < tolerance for k in cycles):
            hidden.append(c)
    return hidden


def _block_maxima(r: np.ndarray, block: int) -> np.ndarray:
    parts = np.array_split(r, max(1, int(math.ceil(r.size / block))))
    return np.array([p.max() for p in parts if p.size])


def detect_cough(dynamic: np.ndarray, fs: float, cfg: PipelineConfig, t0: float = 0.0) -> list[float]:
    """Cough times from the dynamic a_Total series.

    The ordinary impulse level is the median of per-block maxima of the
    rectified series. A cough must clear that level by cough_threshold_k
    MADs and be at least cough_min_ratio times as tall.
    """
    r = np.abs(np.asarray(dynamic, dtype=float))
    if r.size < 3 or not np.any(r):
        return []
    if not np.all(np.isfinite(r)):
        raise DataError("cannot detect coughs in a series with non-finite values")
    level = float(np.median(_block_maxima(r, _samples(cfg.cough_reference_window, fs))))
    _, mad = robust_level(r)
    threshold = max(level + cfg.cough_threshold_k * mad, cfg.cough_min_ratio * level)
    peaks, _ = find_peaks(r, height=threshold, distance=_samples(cfg.cough_min_separation, fs))
    logger.debug("Cough threshold %.4g m/s2 (beat level %.4g), %d candidates", threshold, level, peaks.size)
    return [t0 + int(i) / fs for i in peaks]
