from .channel import ImpairmentLog, LinkConfig, impair_link
from .collector import SessionConfig, central_node_run, reconstruct_timeline
from .sensor import frames_from_trace, sensor_node_run
from .session_store import SessionRecord, SessionStore

__all__ = [
    "LinkConfig",
    "ImpairmentLog",
    "impair_link",
    "SessionConfig",
    "SessionRecord",
    "SessionStore",
    "central_node_run",
    "reconstruct_timeline",
    "sensor_node_run",
    "frames_from_trace",
]
