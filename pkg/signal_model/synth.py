"""Forward chest-motion model and the accelerometer trace it produces.

D(t) = c1 * D_L(t) + c2 * D_H(t)

D_L is a sinusoid at the respiration rate whose phase freezes during breath
holds. D_H is a train of raised-cosine impulses at the heart rate, plus one
larger impulse per cough. Both are differentiated analytically, so the
acceleration returned here is exact at every sample.
"""

from __future__ import annotations

import logging
import math

import numpy as np

import config
from errors import OutOfRangeError

from .scenario import EventKind, EventMark, PhysioScenario
from .trace import AccelTrace

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


def _breathing_time(scenario: PhysioScenario, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Elapsed breathing time (holds removed) and the in-hold mask."""
    tau = t.astype(float, copy=True)
    held = np.zeros(t.shape, dtype=bool)
    for start, end in scenario.holds:
        tau -= np.clip(t - start, 0.0, end - start)
        held |= (t >= start) & (t < end)
    return tau, held


def _respiration(scenario: PhysioScenario, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    tau, held = _breathing_time(scenario, t)
    omega = TWO_PI * scenario.resp_rate
    phase = TWO_PI * scenario.resp_phase + omega * tau
    displacement = scenario.resp_amplitude * np.sin(phase)
    accel = -scenario.resp_amplitude * omega**2 * np.sin(phase)
    accel[held] = 0.0
    return displacement, accel


def heart_centers(scenario: PhysioScenario) -> np.ndarray:
    """Impulse centres heart_onset + k / heart_rate that fall before the end."""
    if scenario.heart_rate <= 0:
        return np.empty(0)
    first = scenario.first_heart_center
    count = int(math.floor((scenario.duration - first) * scenario.heart_rate - 1e-12)) + 1
    if first >= scenario.duration or count <= 0:
        return np.empty(0)
    return first + np.arange(count) / scenario.heart_rate


def _raised_cosine(
    t: np.ndarray, centers: np.ndarray, amplitude: float, width: float
) -> tuple[np.ndarray, np.ndarray]:
    """Train of non-overlapping 0.5 * (1 + cos) impulses and its second derivative."""
    displacement = np.zeros(t.shape)
    accel = np.zeros(t.shape)
    if centers.size == 0 or amplitude == 0:
        return displacement, accel
    k = TWO_PI / width
    right = np.searchsorted(centers, t)
    for idx, valid in ((right - 1, right >= 1), (right, right < centers.size)):
        u = t - centers[np.clip(idx, 0, centers.size - 1)]
        active = valid & (np.abs(u) < width / 2)
        displacement[active] += 0.5 * amplitude * (1.0 + np.cos(k * u[active]))
        accel[active] += -0.5 * amplitude * k**2 * np.cos(k * u[active])
    return displacement, accel


def _heart_activity(scenario: PhysioScenario, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    displacement, accel = _raised_cosine(
        t, heart_centers(scenario), scenario.heart_impulse_amplitude, scenario.heart_impulse_width
    )
    cough_amplitude = scenario.cough_gain * scenario.heart_impulse_amplitude
    for cough in scenario.coughs:
        width = cough.duration if cough.duration > 0 else scenario.cough_width
        center = cough.start + cough.duration / 2
        d, a = _raised_cosine(t, np.array([center]), cough_amplitude, width)
        displacement += d
        accel += a
    return displacement, accel


def _chest_motion(scenario: PhysioScenario, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d_lung, a_lung = _respiration(scenario, t)
    d_heart, a_heart = _heart_activity(scenario, t)
    displacement = scenario.c1 * d_lung + scenario.c2 * d_heart
    accel = scenario.c1 * a_lung + scenario.c2 * a_heart
    return displacement, accel


def displacement_of(scenario: PhysioScenario, t: float) -> float:
    """Noiseless analytic D(t) in metres, for 0 <= t <= duration."""
    if not 0.0 <= t <= scenario.duration:
        raise OutOfRangeError(f"t={t} outside [0, {scenario.duration}]")
    displacement, _ = _chest_motion(scenario, np.array([float(t)]))
    return float(displacement[0])


def acceleration_of(scenario: PhysioScenario, t: np.ndarray) -> np.ndarray:
    """Noiseless analytic d²D/dt² along the chest normal."""
    _, accel = _chest_motion(scenario, np.asarray(t, dtype=float))
    return accel


def _time_of(tau: float, holds: list[tuple[float, float]]) -> float:
    t = tau
    for start, end in holds:
        if t > start:
            t += end - start
    return t


def breath_maxima(scenario: PhysioScenario) -> list[float]:
    """Times where the respiration phase crosses a maximum, holds excluded."""
    if scenario.resp_rate <= 0 or scenario.resp_amplitude == 0 or scenario.c1 == 0:
        return []
    holds = scenario.holds
    held_total = sum(end - start for start, end in holds)
    tau_end = scenario.duration - held_total
    times = []
    m = math.ceil(scenario.resp_phase - 0.25)
    while True:
        tau = (m + 0.25 - scenario.resp_phase) / scenario.resp_rate
        if tau > tau_end:
            break
        t = _time_of(tau, holds)
        if 0.0 <= t < scenario.duration:
            times.append(t)
        m += 1
    return times


def ground_truth(scenario: PhysioScenario) -> list[EventMark]:
    marks: list[EventMark] = []
    if scenario.c2 != 0 and scenario.heart_impulse_amplitude != 0:
        marks.extend(EventMark(EventKind.HEART_BEAT, float(c)) for c in heart_centers(scenario))
    marks.extend(EventMark(EventKind.BREATH, t) for t in breath_maxima(scenario))
    marks.extend(scenario.events)
    return sorted(marks, key=lambda e: (e.start, e.kind.value))


def synthesize_trace(scenario: PhysioScenario, seed: int) -> tuple[AccelTrace, list[EventMark]]:
    """Sensor trace and ground-truth marks for a scenario.

    The scalar chest acceleration is projected on ``orientation``; gravity
    (when included) is added along +z and seeded Gaussian noise per axis.
    Identical (scenario, seed) pairs give bit-identical arrays.
    """
    n = scenario.n_samples
    t = np.arange(n) / scenario.sample_rate
    _, accel = _chest_motion(scenario, t)
    xyz = accel[:, None] * np.asarray(scenario.orientation)[None, :]
    if scenario.gravity_included:
        xyz[:, 2] += config.STANDARD_GRAVITY
    if scenario.noise_std > 0:
        rng = np.random.default_rng(seed)
        xyz += rng.normal(0.0, scenario.noise_std, size=xyz.shape)

    if scenario.skin_temp_end is None:
        skin_temp = np.full(n, scenario.skin_temp)
    else:
        skin_temp = scenario.skin_temp + (scenario.skin_temp_end - scenario.skin_temp) * t / scenario.duration
    pressure = np.full(n, scenario.ambient_pressure)

    truth = ground_truth(scenario)
    logger.debug(
        "Synthesized %d samples at %.6g Hz with %d truth marks (seed=%d)", n, scenario.sample_rate, len(truth), seed
    )
    return AccelTrace(0.0, scenario.sample_rate, xyz[:, 0], xyz[:, 1], xyz[:, 2], skin_temp, pressure), truth
