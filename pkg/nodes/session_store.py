"""SessionRecord and its on-disk directory layout.

A session directory holds ``session.json`` (metadata, link counters,
segments, alerts), ``reports.jsonl`` (one VitalsReport per line),
``samples.csv`` (reconstructed samples, trace schema) and optionally the raw
``capture.bin`` byte stream.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import config
from dsp.pipeline import read_reports, write_reports
from dsp.vitals import HrrStatus, VitalsReport
from errors import DataError
from protocol.link import LinkStats
from signal_model.trace import AccelTrace, write_csv

logger = logging.getLogger(__name__)

SESSION_FILE = "session.json"
REPORTS_FILE = "reports.jsonl"
SAMPLES_FILE = "samples.csv"
CAPTURE_FILE = "capture.bin"


def alert_for(report: VitalsReport) -> Optional[dict]:
    if report.status is HrrStatus.HEALTHY_RANGE:
        return None
    return {
        "window_start": report.window_start,
        "window_end": report.window_end,
        "hrr": "undefined" if report.hrr is None else float(report.hrr),
        "status": report.status.value,
    }


@dataclass
class SessionRecord:
    session_id: str
    scenario_digest: Optional[str]
    config_digest: str
    start_time: Optional[float]
    sample_rate: float
    link_stats: LinkStats
    reports: list[VitalsReport] = field(default_factory=list)
    segments: list[tuple[float, float]] = field(default_factory=list)
    link_seed: Optional[int] = None
    traces: list[AccelTrace] = field(default_factory=list, repr=False)

    @property
    def alerts(self) -> list[dict]:
        return [a for a in (alert_for(r) for r in self.reports) if a is not None]

    def metadata(self) -> dict:
        return {
            "session_id": self.session_id,
            "scenario_digest": self.scenario_digest,
            "config_digest": self.config_digest,
            "link_seed": self.link_seed,
            "start_time": self.start_time,
            "sample_rate": self.sample_rate,
            "link_stats": self.link_stats.to_dict(),
            "segments": [[start, end] for start, end in self.segments],
            "windows": len(self.reports),
            "alerts": self.alerts,
        }


class SessionStore:
    """Reads and writes one session directory."""

    def __init__(self, base_dir: Optional[Path] = None):
        self.base_dir = Path(base_dir) if base_dir is not None else config.DATA_DIR / "session"

    def save(self, record: SessionRecord, capture: Optional[bytes] = None) -> Path:
        self.base_dir.mkdir(parents=True, exist_ok=True)
        (self.base_dir / SESSION_FILE).write_text(
            json.dumps(record.metadata(), indent=2) + "\n", encoding="utf-8"
        )
        write_reports(record.reports, self.base_dir / REPORTS_FILE)
        write_csv(record.traces, self.base_dir / SAMPLES_FILE)
        if capture is not None:
            (self.base_dir / CAPTURE_FILE).write_bytes(capture)
        logger.info("Saved session %s to %s", record.session_id, self.base_dir)
        return self.base_dir

    def load(self) -> SessionRecord:
        """Load metadata and reports; samples stay on disk."""
        session_file = self.base_dir / SESSION_FILE
        reports_file = self.base_dir / REPORTS_FILE
        for path in (session_file, reports_file):
            if not path.is_file():
                raise DataError(f"{self.base_dir}: missing {path.name}")
        try:
            meta = json.loads(session_file.read_text(encoding="utf-8"))
            record = SessionRecord(
                session_id=str(meta["session_id"]),
                scenario_digest=meta.get("scenario_digest"),
                config_digest=str(meta["config_digest"]),
                start_time=meta.get("start_time"),
                sample_rate=float(meta["sample_rate"]),
                link_stats=LinkStats.from_dict(meta.get("link_stats", {})),
                segments=[(float(a), float(b)) for a, b in meta.get("segments", [])],
                link_seed=meta.get("link_seed"),
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{session_file}: malformed session metadata: {exc}") from exc
        record.reports = read_reports(reports_file)
        return record

    def load_capture(self) -> bytes:
        path = self.base_dir / CAPTURE_FILE
        if not path.is_file():
            raise DataError(f"{self.base_dir}: no {CAPTURE_FILE} in session")
        return path.read_bytes()
