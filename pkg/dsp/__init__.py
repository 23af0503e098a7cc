from .filters import integrate_twice, magnitude, remove_gravity, separate_bands
from .peaks import detect_cough, detect_peaks
from .pipeline import read_reports, run_pipeline, write_events, write_reports
from .settings import PipelineConfig, load_pipeline_config
from .vitals import (
    DetectedEvents,
    HrrStatus,
    VitalsReport,
    WindowContext,
    altitude_from_pressure,
    classify_hrr,
    count_vitals,
)

__all__ = [
    "PipelineConfig",
    "load_pipeline_config",
    "magnitude",
    "remove_gravity",
    "integrate_twice",
    "separate_bands",
    "detect_peaks",
    "detect_cough",
    "DetectedEvents",
    "HrrStatus",
    "VitalsReport",
    "WindowContext",
    "count_vitals",
    "classify_hrr",
    "altitude_from_pressure",
    "run_pipeline",
    "read_reports",
    "write_reports",
    "write_events",
]
