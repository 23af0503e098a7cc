"""Sensor node: scenario -> quantized samples -> encoded frames."""

from __future__ import annotations

import logging

import numpy as np

import config
from errors import ParameterError
from protocol.frame import MAX_SAMPLES, SensorFrame, encode_frame
from protocol.link import MILLI_G, SEQ_MODULUS
from signal_model.scenario import PhysioScenario
from signal_model.synth import synthesize_trace
from signal_model.trace import AccelTrace

logger = logging.getLogger(__name__)

# t0 is carried in whole milliseconds
MAX_SAMPLE_RATE = 1000.0


def _quantize(values: np.ndarray, scale: float, low: int, high: int, name: str) -> np.ndarray:
    scaled = np.round(np.nan_to_num(values, nan=0.0) * scale)
    clipped = np.clip(scaled, low, high)
    saturated = int(np.count_nonzero(clipped != scaled))
    if saturated:
        logger.warning("%d %s readings saturated the wire range", saturated, name)
    return clipped.astype(np.int64)


def frames_from_trace(
    trace: AccelTrace, batch_n: int = config.BATCH_N, node_id: int = config.NODE_ID
) -> list[SensorFrame]:
    """Batch a trace into frames with seq 0, 1, 2, ... (16-bit wrap)."""
    if not 1 <= batch_n <= MAX_SAMPLES:
        raise ParameterError(f"batch_n must be in 1..{MAX_SAMPLES}, got {batch_n}")
    if trace.sample_rate > MAX_SAMPLE_RATE:
        raise ParameterError(f"sample_rate must be <= {MAX_SAMPLE_RATE:g} Hz for millisecond timestamps")
    axes = _quantize(trace.xyz(), 1.0 / MILLI_G, -32768, 32767, "acceleration")
    temps = _quantize(trace.skin_temp, 100.0, -32768, 32767, "skin temperature")
    pressures = _quantize(trace.pressure, 1.0, 0, 0xFFFFFFFF, "pressure")

    frames = []
    for k, start in enumerate(range(0, len(trace), batch_n)):
        stop = min(start + batch_n, len(trace))
        t0_ms = int(round((trace.t0 + start / trace.sample_rate) * 1000))
        frames.append(
            SensorFrame(
                node_id=node_id,
                seq=k % SEQ_MODULUS,
                t0=t0_ms,
                samples=tuple(tuple(int(v) for v in row) for row in axes[start:stop]),
                skin_temp=int(temps[start]),
                pressure=int(pressures[start]),
            )
        )
    return frames


def sensor_node_run(
    scenario: PhysioScenario,
    batch_n: int = config.BATCH_N,
    seed: int = config.DEFAULT_SEED,
    node_id: int = config.NODE_ID,
) -> list[bytes]:
    """Encoded frames for a synthesized scenario, in transmission order."""
    trace, _ = synthesize_trace(scenario, seed)
    frames = [encode_frame(f) for f in frames_from_trace(trace, batch_n, node_id)]
    logger.info("Sensor node %d encoded %d samples into %d frames", node_id, len(trace), len(frames))
    return frames
