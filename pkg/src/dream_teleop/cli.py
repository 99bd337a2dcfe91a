"""Command-line entry point: simulate, analyze, tlx, serve, replay."""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
from pathlib import Path

from . import __version__
from .config import ScenarioConfig, load_scenario, scenario_from_dict
from .errors import (
    ConfigurationError,
    EmptyReportError,
    LogFormatError,
    UnpairedParticipantError,
)
from .logstore import read_log, write_log
from .metrics import (
    JourneyReport,
    StopParams,
    TaskGeometry,
    aggregate,
    compare_conditions,
    segment_journeys,
)
from .pilots import run_scenario
from .tlx import (
    DegenerateResult,
    format_hypothesis_table,
    hypotheses_to_dict,
    read_responses_csv,
    run_hypotheses,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2

PORT_ENV_VAR = "DREAM_TELEOP_PORT"
DEFAULT_PORT = 8765


def _default_port() -> int:
    raw = os.environ.get(PORT_ENV_VAR)
    if raw is None:
        return DEFAULT_PORT
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"{PORT_ENV_VAR} must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dream-teleop",
        description="Grab-and-drag UAV teleoperation sandbox: headless runs, flight-log analysis, workload statistics, and a live session server.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a scripted scenario and write its flight log")
    p_sim.add_argument("config", type=Path, help="scenario config file (JSON)")
    p_sim.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_sim.add_argument("--out", type=Path, default=None, help="output .dreamlog path")

    p_an = sub.add_parser("analyze", help="journey metrics from one or more flight logs")
    p_an.add_argument("logs", nargs="+", type=Path, help=".dreamlog files")
    p_an.add_argument("--geometry", type=Path, default=None, help="task geometry JSON (overrides log headers)")
    p_an.add_argument("--format", choices=("text", "json"), default="text")
    p_an.add_argument("--compare", default=None, metavar="A:B", help="compare two condition groups, e.g. dream:joystick")
    p_an.add_argument("--pooled", action="store_true", help="pool samples across journeys instead of journey-mean-first")
    p_an.add_argument("--report-dir", type=Path, default=None, help="write figures, report.json, and journeys.csv here")

    p_tlx = sub.add_parser("tlx", help="paired hypothesis tests over workload responses")
    p_tlx.add_argument("csv", type=Path, help="responses CSV (participant,condition,six scales)")
    p_tlx.add_argument("--alpha", type=float, default=0.05, help="significance level (default 0.05)")
    p_tlx.add_argument("--format", choices=("text", "json"), default="text")
    p_tlx.add_argument("--report-dir", type=Path, default=None, help="write figures and hypotheses.json here")

    p_srv = sub.add_parser("serve", help="host a live session over the WebSocket protocol")
    p_srv.add_argument("--port", type=int, default=None,
                       help=f"listen port (default {DEFAULT_PORT}, or ${PORT_ENV_VAR})")
    p_srv.add_argument("--mode", choices=("dream", "joystick"), default="dream")
    p_srv.add_argument("--config", type=Path, default=None, help="scenario config file (JSON)")
    p_srv.add_argument("--record-dir", type=Path, default=None, help="record each session to this directory")
    p_srv.add_argument("--ui-dir", type=Path, default=None, help="serve this directory as the web UI")
    p_srv.add_argument("--latency", type=float, default=None, help="override link latency (s)")
    p_srv.add_argument("--no-pacing", action="store_true", help="run the loop as fast as possible (headless testing)")

    p_rep = sub.add_parser("replay", help="re-emit a recorded log over the live protocol (read-only)")
    p_rep.add_argument("log", type=Path)
    p_rep.add_argument("--speed", type=float, default=1.0, help="playback speed multiplier")
    p_rep.add_argument("--port", type=int, default=None,
                       help=f"listen port (default {DEFAULT_PORT}, or ${PORT_ENV_VAR})")
    p_rep.add_argument("--ui-dir", type=Path, default=None)

    return parser


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    try:
        raw = json.loads(args.config.read_text(encoding="utf-8"))
    except FileNotFoundError:
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    seed = args.seed
    if seed is None and not (isinstance(raw, dict) and "seed" in raw):
        seed = secrets.randbits(31)
        print(f"seed not given; generated seed {seed}")

    try:
        config = scenario_from_dict(raw)
        if seed is not None:
            from dataclasses import replace

            config = replace(config, seed=seed)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    log = run_scenario(config)
    out = args.out or Path(f"{config.mode}-{config.seed}.dreamlog")
    write_log(log, out)
    journeys = segment_journeys(log, config.geometry, config.stop)
    print(
        f"wrote {out} ({len(log.samples)} samples, {len(journeys)} journeys, "
        f"{config.duration_s:g} s simulated, seed {config.seed})"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze


def _load_geometry_file(path: Path) -> TaskGeometry:
    data = json.loads(path.read_text(encoding="utf-8"))
    return TaskGeometry.from_dict(data, where="geometry")


def _condition_of(log) -> str:
    cfg = log.header.manifest.get("config")
    if isinstance(cfg, dict) and cfg.get("mode") in ("dream", "joystick"):
        return cfg["mode"]
    return "unknown"


def _stop_params_of(log) -> StopParams | None:
    cfg = log.header.manifest.get("config")
    if isinstance(cfg, dict) and isinstance(cfg.get("stop"), dict):
        try:
            return StopParams.from_dict(cfg["stop"])
        except (ConfigurationError, TypeError, ValueError):
            return None
    return None


def _format_report_table(reports: list[JourneyReport]) -> str:
    labels = [r.label or "?" for r in reports]
    rows = [
        ("MLE [m]", [f"{r.mle_m:.4f}" for r in reports]),
        ("MYE [rad]", [f"{r.mye_rad:.4f}" for r in reports]),
        ("MCT [s]", [f"{r.mct_s:.3f}" for r in reports]),
        ("journeys", [str(r.n_journeys) for r in reports]),
    ]
    width = max(12, *(len(l) + 2 for l in labels))
    out = ["Metric".ljust(14) + "".join(l.rjust(width) for l in labels)]
    out.append("-" * (14 + width * len(labels)))
    for name, cells in rows:
        out.append(name.ljust(14) + "".join(c.rjust(width) for c in cells))
    return "\n".join(out)


def cmd_analyze(args) -> int:
    geometry = None
    if args.geometry is not None:
        try:
            geometry = _load_geometry_file(args.geometry)
        except (OSError, json.JSONDecodeError, ConfigurationError) as exc:
            print(f"error: --geometry: {exc}", file=sys.stderr)
            return EXIT_CONFIG

    files = []
    failures = 0
    for path in args.logs:
        try:
            log = read_log(path)
        except (OSError, LogFormatError) as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            failures += 1
            files.append({"path": str(path), "error": str(exc)})
            continue
        geom = geometry
        if geom is None and log.header.geometry is not None:
            try:
                geom = TaskGeometry.from_dict(log.header.geometry)
            except ConfigurationError as exc:
                print(f"error: {path}: bad geometry header: {exc}", file=sys.stderr)
                failures += 1
                files.append({"path": str(path), "error": str(exc)})
                continue
        if geom is None:
            geom = TaskGeometry()
            print(f"warning: {path}: no geometry header; using the default task geometry", file=sys.stderr)
        stop = _stop_params_of(log) or StopParams()
        journeys = segment_journeys(log, geom, stop)
        files.append({
            "path": str(path),
            "condition": _condition_of(log),
            "journeys": journeys,
            "log": log,
            "geometry": geom,
        })

    ok_files = [f for f in files if "journeys" in f]
    reports: dict[str, JourneyReport] = {}
    file_reports = []
    for f in ok_files:
        try:
            rep = aggregate(f["journeys"], label=Path(f["path"]).name, pooled=args.pooled)
            file_reports.append(rep)
            f["report"] = rep
        except EmptyReportError:
            f["report"] = None

    for condition in sorted({f["condition"] for f in ok_files}):
        journeys = [j for f in ok_files if f["condition"] == condition for j in f["journeys"]]
        if journeys:
            reports[condition] = aggregate(journeys, label=condition, pooled=args.pooled)

    all_journeys = [j for f in ok_files for j in f["journeys"]]
    overall = aggregate(all_journeys, label="all", pooled=args.pooled) if all_journeys else None

    comparison = None
    if args.compare:
        try:
            name_a, name_b = args.compare.split(":", 1)
        except ValueError:
            print("error: --compare expects A:B", file=sys.stderr)
            return EXIT_CONFIG
        if name_a not in reports or name_b not in reports:
            print(
                f"error: --compare: conditions {name_a!r} and {name_b!r} must both have journeys "
                f"(found: {sorted(reports) or 'none'})",
                file=sys.stderr,
            )
            return EXIT_CONFIG
        comparison = compare_conditions(reports[name_a], reports[name_b])

    payload = {
        "files": [
            {"path": f["path"], "error": f["error"]}
            if "error" in f
            else {
                "path": f["path"],
                "condition": f["condition"],
                "report": f["report"].to_dict() if f["report"] else None,
            }
            for f in files
        ],
        "conditions": {name: rep.to_dict() for name, rep in reports.items()},
        "aggregate": overall.to_dict() if overall else None,
        "comparison": comparison.to_dict() if comparison else None,
    }

    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for f in files:
            if "error" in f:
                print(f"{f['path']}: ERROR {f['error']}")
            elif f["report"] is None:
                print(f"{f['path']}: no completed journeys")
            else:
                r = f["report"]
                print(
                    f"{f['path']}: condition={f['condition']} journeys={r.n_journeys} "
                    f"MLE={r.mle_m:.4f} m MYE={r.mye_rad:.4f} rad MCT={r.mct_s:.3f} s"
                )
        if reports:
            print()
            print(_format_report_table([reports[k] for k in sorted(reports)]))
        if comparison is not None:
            print()
            m = comparison.metrics
            print(f"Comparison {comparison.label_a} vs {comparison.label_b}:")
            for name in ("mle_m", "mye_rad", "mct_s"):
                e = m[name]
                print(
                    f"  {name}: {e['a']:.4f} vs {e['b']:.4f} "
                    f"(difference {e['difference']:+.4f}, ratio {e['ratio']:.3f})"
                )

    if args.report_dir is not None and ok_files:
        from . import figures

        rd = args.report_dir
        rd.mkdir(parents=True, exist_ok=True)
        (rd / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
        figures.write_journeys_csv(list(reports.values()), rd / "journeys.csv")
        for f in ok_files:
            stem = Path(f["path"]).stem
            figures.save_trajectory_figure(f["log"], f["geometry"], rd / f"trajectory-{stem}.png", title=stem)
        if reports:
            figures.save_metric_comparison_figure(
                [reports[k] for k in sorted(reports)], rd / "metrics-comparison.png"
            )
        for name, rep in reports.items():
            figures.save_journey_series_figure(rep, rd / f"journeys-{name}.png")
        print(f"report written to {rd}", file=sys.stderr)

    return EXIT_RUNTIME if failures else EXIT_OK


# ---------------------------------------------------------------------------
# tlx


def cmd_tlx(args) -> int:
    try:
        responses = read_responses_csv(args.csv)
    except FileNotFoundError:
        print(f"error: {args.csv}: not found", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigurationError as exc:
        print(f"error: {args.csv}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not (0.0 <= args.alpha <= 1.0):
        print(f"error: --alpha must be in [0, 1], got {args.alpha}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        rows = run_hypotheses(responses, alpha=args.alpha)
    except (UnpairedParticipantError, ConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    for row in rows:
        if isinstance(row, DegenerateResult):
            print(f"warning: {row.criterion}: {row.error}", file=sys.stderr)

    if args.format == "json":
        print(json.dumps(hypotheses_to_dict(rows, args.alpha), indent=2, sort_keys=True))
    else:
        print(format_hypothesis_table(rows, args.alpha))

    if args.report_dir is not None:
        from . import figures

        rd = args.report_dir
        rd.mkdir(parents=True, exist_ok=True)
        (rd / "hypotheses.json").write_text(
            json.dumps(hypotheses_to_dict(rows, args.alpha), indent=2, sort_keys=True), encoding="utf-8"
        )
        figures.save_tlx_means_figure(responses, rd / "tlx-means.png")
        print(f"report written to {rd}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# serve / replay


def _scenario_for_serve(args) -> ScenarioConfig:
    if args.config is not None:
        config = load_scenario(args.config)
    else:
        config = ScenarioConfig(mode=args.mode, geometry=TaskGeometry())
    from dataclasses import replace

    if args.config is not None and args.mode and args.mode != config.mode:
        config = replace(config, mode=args.mode)
    if args.latency is not None:
        from .config import ChannelConfig

        ch = config.channel
        config = replace(
            config,
            channel=ChannelConfig(latency_s=args.latency, jitter_s=ch.jitter_s, drop=ch.drop),
        )
    return config


def cmd_serve(args) -> int:
    from .service import serve_forever

    try:
        config = _scenario_for_serve(args)
        port = args.port if args.port is not None else _default_port()
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        serve_forever(
            config,
            port=port,
            record_dir=args.record_dir,
            ui_dir=args.ui_dir,
            pacing=not args.no_pacing,
        )
    except OSError as exc:
        print(f"error: cannot bind port {port}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_replay(args) -> int:
    from .service import replay_forever

    try:
        port = args.port if args.port is not None else _default_port()
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        replay_forever(args.log, port=port, speed=args.speed, ui_dir=args.ui_dir)
    except (OSError, LogFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "simulate": cmd_simulate,
        "analyze": cmd_analyze,
        "tlx": cmd_tlx,
        "serve": cmd_serve,
        "replay": cmd_replay,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
