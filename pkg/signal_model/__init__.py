from .scenario import EventKind, EventMark, PhysioScenario, load_scenario
from .synth import acceleration_of, displacement_of, ground_truth, synthesize_trace
from .trace import AccelSample, AccelTrace

__all__ = [
    "EventKind",
    "EventMark",
    "PhysioScenario",
    "load_scenario",
    "AccelSample",
    "AccelTrace",
    "synthesize_trace",
    "ground_truth",
    "displacement_of",
    "acceleration_of",
]
