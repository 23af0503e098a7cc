"""Command-line entry point: simulate, analyze, run, report."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

import config
from dsp.pipeline import run_pipeline, write_events, write_reports
from dsp.settings import load_pipeline_config
from dsp.vitals import HrrStatus, VitalsReport
from errors import CardiorespError
from nodes.channel import LinkConfig, impair_link
from nodes.collector import SessionConfig, central_node_run, replay_capture
from nodes.sensor import sensor_node_run
from nodes.session_store import SessionStore
from protocol.link import LinkStats
from signal_model.scenario import load_scenario
from signal_model.synth import synthesize_trace
from signal_model.trace import AccelTrace

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_OUT_OF_RANGE = 1
EXIT_ERROR = 2


def _exit_status(reports: Iterable[VitalsReport]) -> int:
    if any(r.status is HrrStatus.OUT_OF_RANGE for r in reports):
        return EXIT_OUT_OF_RANGE
    return EXIT_OK


def _format_stats(stats: LinkStats) -> str:
    return " ".join(f"{name}={value}" for name, value in stats.to_dict().items())


def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    trace, truth = synthesize_trace(scenario, args.seed)
    out = Path(args.out)
    trace.to_csv(out / "trace.csv")
    (out / "truth.jsonl").write_text("".join(json.dumps(m.to_dict()) + "\n" for m in truth), encoding="utf-8")
    print(f"Wrote {len(trace)} samples and {len(truth)} truth marks to {out}")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = load_pipeline_config(args.config)
    trace = AccelTrace.from_csv(args.trace)
    events, reports = run_pipeline(trace, cfg)
    out = Path(args.out)
    write_reports(reports, out / "reports.jsonl")
    write_events(events, out / "events.jsonl")
    for report in reports:
        print(report.summary_line())
    return _exit_status(reports)


def cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    cfg = load_pipeline_config(args.config)
    link = LinkConfig(loss_prob=args.loss, bit_flip_prob=args.bitflip, seed=args.link_seed)
    frames = sensor_node_run(scenario, batch_n=args.batch, seed=args.seed)
    stream, log = impair_link(frames, link)
    session = SessionConfig(
        sample_rate=scenario.sample_rate,
        pipeline=cfg,
        scenario_digest=scenario.digest(),
        link_seed=args.link_seed,
    )
    record = central_node_run(stream, session, out_dir=Path(args.out), capture=True)
    print(f"Link: sent={log.frames_sent} dropped={len(log.dropped)} corrupted={len(log.corrupted)}")
    print(f"LinkStats: {_format_stats(record.link_stats)}")
    if not record.reports:
        print("warning: no complete window was received; 0 windows analysed")
    for report in record.reports:
        print(report.summary_line())
    return _exit_status(record.reports)


def cmd_report(args: argparse.Namespace) -> int:
    store = SessionStore(Path(args.session))
    record = store.load()
    print(f"Session {record.session_id}")
    print(f"  scenario digest: {record.scenario_digest or '-'}")
    print(f"  config digest:   {record.config_digest}")
    print(f"  start time:      {record.start_time if record.start_time is not None else '-'}")
    print(f"  sample rate:     {record.sample_rate:g} Hz")
    print(f"LinkStats: {_format_stats(record.link_stats)}")
    if args.replay:
        replayed = replay_capture(store.load_capture(), record.sample_rate)
        print(f"Replayed: {_format_stats(replayed)}")
        if replayed != record.link_stats:
            logger.warning("Replayed link counters differ from the saved session")
            print("warning: replayed link counters differ from the saved session")
    print(f"{len(record.reports)} windows")
    for r in record.reports:
        print(
            f"  [{r.window_start:8.2f}-{r.window_end:8.2f}] HR={r.hr_count:<3d} RR={r.rr_count:<3d} "
            f"HRR {r.hr_count}/{r.rr_count} = {r.hrr_label} {r.status.value}"
        )
    alerts = record.alerts
    print(f"{len(alerts)} alerts")
    for alert in alerts:
        print(f"  window {alert['window_start']:.2f}-{alert['window_end']:.2f} HRR={alert['hrr']} {alert['status']}")
    return EXIT_OK


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must be in [0, 1], got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cardioresp", description="Chest-accelerometer heart/respiration simulator and analyser."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="synthesize a trace and its ground truth")
    simulate.add_argument("--scenario", required=True, help="scenario TOML file")
    simulate.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    simulate.add_argument("--out", default=str(config.DATA_DIR / "simulate"))
    simulate.set_defaults(handler=cmd_simulate)

    analyze = sub.add_parser("analyze", help="run the pipeline on a trace CSV")
    analyze.add_argument("--trace", required=True, help="trace CSV (t,ax,ay,az,temp,pressure)")
    analyze.add_argument("--config", help="pipeline config TOML file")
    analyze.add_argument("--out", default=str(config.DATA_DIR / "analyze"))
    analyze.set_defaults(handler=cmd_analyze)

    run = sub.add_parser("run", help="sensor node -> lossy link -> central node")
    run.add_argument("--scenario", required=True, help="scenario TOML file")
    run.add_argument("--config", help="pipeline config TOML file")
    run.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    run.add_argument("--loss", type=_probability, default=0.0, help="per-frame drop probability")
    run.add_argument("--bitflip", type=_probability, default=0.0, help="per-frame single-bit-flip probability")
    run.add_argument("--link-seed", type=int, default=0)
    run.add_argument("--batch", type=int, default=config.BATCH_N, help="samples per frame (1-16)")
    run.add_argument("--out", default=str(config.DATA_DIR / "session"))
    run.set_defaults(handler=cmd_run)

    report = sub.add_parser("report", help="summarize a saved session directory")
    report.add_argument("--session", required=True, help="session directory")
    report.add_argument("--replay", action="store_true", help="re-decode capture.bin and check the link counters")
    report.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=getattr(logging, config.LOG_LEVEL, logging.INFO))
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (CardiorespError, OSError) as exc:
        logger.debug("Command %s failed", args.command, exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
