"""Command-line entry point.

Subcommands cover the batch pipeline (``run``), the streaming pipeline
(``run-online``), metric evaluation (``eval``), transcript debugging
(``parse``), grid preview (``sample-grid``) and the fully mocked demo
(``mock-demo``). Every subcommand is runnable with mock backends only.

Exit codes: 0 success, 1 run error, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from PIL import Image

from . import __version__
from .backends import Backends, HttpPropagator, HttpSegmenter, OpenAiSelector
from .backends.mock import MockScenario, load_mock_scenarios
from .config import CliConfig, resolve_config
from .core import MaskSequence
from .datasets import load_annotation_dir, load_manifest
from .errors import ConfigError, DatasetError, PipelineError, RunError, TranscriptParseError
from .events import EventLog
from .mask_io import (
    list_frame_files,
    load_clip,
    load_frame,
    load_mask_png,
    save_mask_dir,
    save_mask_png,
)
from .metrics import EvalReport, evaluate_sequence
from .offline import OfflineRunResult, RunConfig, run_reasoning_vis, union_of_instances
from .online import online_finish, online_init, online_step
from .parsing import parse_output_list
from .sampling import compose_grid, compute_xi_offline, sample_candidates

logger = logging.getLogger(__name__)


def _flush_events(log: EventLog, events: list[dict], start: int = 0) -> int:
    for event in events[start:]:
        payload = {k: v for k, v in event.items() if k != "type"}
        log.emit(event["type"], **payload)
    return len(events)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML config file")
    parser.add_argument("--backend", choices=["mock", "wire"], dest="backend_mode",
                        help="backend mode (default: mock)")
    parser.add_argument("--fixture", dest="mock_fixture", help="mock scenario JSON file")
    parser.add_argument("--scenario", dest="mock_scenario", help="mock scenario key")
    parser.add_argument("--log-level", dest="log_level", help="debug|info|warning|error")


def _resolve(args: argparse.Namespace, extra: dict | None = None) -> CliConfig:
    overrides = {
        "backend_mode": getattr(args, "backend_mode", None),
        "mock_fixture": getattr(args, "mock_fixture", None),
        "mock_scenario": getattr(args, "mock_scenario", None),
        "log_level": getattr(args, "log_level", None),
    }
    if extra:
        overrides.update(extra)
    return resolve_config(getattr(args, "config", None), overrides)


def _build_backends(cfg: CliConfig) -> tuple[Backends, MockScenario | None]:
    if cfg.backend_mode == "mock":
        scenarios = load_mock_scenarios(cfg.mock_fixture or None)
        if cfg.mock_scenario not in scenarios:
            raise ConfigError(
                f"unknown mock scenario {cfg.mock_scenario!r}; have: {', '.join(sorted(scenarios))}"
            )
        scenario = scenarios[cfg.mock_scenario]
        return scenario.build_backends(), scenario
    return (
        Backends(
            selector=OpenAiSelector(cfg.selector),
            segmenter=HttpSegmenter(cfg.segmenter_endpoint),
            propagator=HttpPropagator(cfg.propagator_endpoint),
        ),
        None,
    )


def _write_json(path: Path, obj: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _selection_obj(sel) -> dict:
    return {
        "object_index": sel.object_index,
        "candidate_index": sel.candidate_index,
        "source_frame_index": sel.source_frame_index,
        "description": sel.description,
    }


def _write_offline_outputs(
    out: Path,
    result: OfflineRunResult,
    union: MaskSequence | None,
    *,
    mode: str,
    query: str,
    include_timings: bool = True,
) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "transcript.txt").write_text(result.transcript, encoding="utf-8")
    instance_dirs = []
    for inst in result.instances:
        rel = f"instances/obj_{inst.selection.object_index}"
        save_mask_dir(inst.resolved_sequence.masks, out / rel)
        instance_dirs.append(rel)
    if union is not None:
        save_mask_dir(union.masks, out / "union")
    manifest = {
        "command": "run",
        "mode": mode,
        "query": query,
        "xi": result.plan.xi,
        "candidate_frames": list(result.plan.candidate_frame_indices),
        "selections": [_selection_obj(s) for s in result.selections],
        "warnings": result.warnings,
        "partial": result.partial,
        "transcript": "transcript.txt",
        "outputs": {"instances": instance_dirs, "union": "union" if union is not None else None},
        "error": None,
    }
    if include_timings:
        manifest["timings"] = result.timings
    _write_json(out / "manifest.json", manifest)


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _resolve(args, {
        "candidate_target": args.target,
        "grid_side_cap": args.side_cap,
        "worker_limit": args.workers,
        "non_overlap": False if args.allow_overlap else None,
    })
    backends, _ = _build_backends(cfg)
    clip = load_clip(args.frames)
    out = Path(args.out)
    run_cfg = RunConfig(
        candidate_target=cfg.candidate_target,
        grid_side_cap=cfg.grid_side_cap,
        non_overlap=cfg.non_overlap,
        vos_union=args.mode == "vos",
        worker_limit=cfg.worker_limit,
    )
    try:
        result = run_reasoning_vis(clip, args.query, backends, run_cfg)
    except RunError as exc:
        out.mkdir(parents=True, exist_ok=True)
        (out / "transcript.txt").write_text(exc.transcript, encoding="utf-8")
        _write_json(out / "manifest.json", {
            "command": "run", "mode": args.mode, "query": args.query,
            "error": str(exc), "transcript": "transcript.txt",
            "selections": [], "warnings": [], "partial": True, "outputs": {},
        })
        logger.error("run failed: %s", exc)
        return 1
    union = union_of_instances(result, clip) if args.mode == "vos" else None
    _write_offline_outputs(out, result, union, mode=args.mode, query=args.query)
    print(f"run complete: {len(result.instances)} instance(s), output in {out}")
    return 0


def cmd_run_online(args: argparse.Namespace) -> int:
    cfg = _resolve(args, {"online_xi": args.xi})
    backends, _ = _build_backends(cfg)
    out = Path(args.out)
    masks_dir = out / "masks"
    if args.stdin_frames:
        paths = [Path(line.strip()) for line in sys.stdin if line.strip()]
    else:
        if not args.frames:
            raise ConfigError("run-online needs --frames DIR or --stdin-frames")
        paths = list_frame_files(args.frames)

    state = online_init(args.query, cfg.online_xi, backends)
    emitted = 0
    masks_dir.mkdir(parents=True, exist_ok=True)
    with EventLog(out / "events.jsonl") as log:
        for t, path in enumerate(paths, start=1):
            frame = load_frame(path, t)
            mask = online_step(state, frame)
            save_mask_png(mask, masks_dir / f"{t:05d}.png")
            emitted = _flush_events(log, state.events, emitted)
        online_finish(state)
    _write_json(out / "manifest.json", {
        "command": "run-online",
        "query": args.query,
        "xi": cfg.online_xi,
        "frames_processed": len(paths),
        "final_keyframe_index": state.keyframe_index,
        "warnings": state.warnings,
        "outputs": {"masks": "masks", "events": "events.jsonl"},
    })
    print(f"processed {len(paths)} frame(s), output in {out}")
    return 0


def _load_pred_sequence(directory: Path) -> MaskSequence:
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() == ".png")
    if not files:
        raise DatasetError(f"no prediction PNGs in {directory}")
    return MaskSequence(instance_id=1, masks=tuple(load_mask_png(p) for p in files))


def cmd_eval(args: argparse.Namespace) -> int:
    report = EvalReport(aggregate_by=args.aggregate)
    pred_root = Path(args.pred)
    if args.manifest:
        jobs = load_manifest(args.manifest)
        for job in jobs:
            pred_dir = pred_root / job.name
            pred = _load_pred_sequence(pred_dir)
            gt = load_annotation_dir(job.gt_dir, job.object_id)
            masks = gt.binary_masks()
            record = evaluate_sequence(
                pred, masks, sequence_id=job.name, video=Path(job.video_dir).name,
                tolerance=args.tolerance,
            )
            report.add(record)
    else:
        if not args.gt:
            raise ConfigError("eval needs --gt DIR or --manifest FILE")
        gt_root = Path(args.gt)
        direct_pngs = any(p.suffix.lower() == ".png" for p in pred_root.iterdir())
        pairs = (
            [(pred_root.name, pred_root, gt_root)]
            if direct_pngs
            else [(d.name, d, gt_root / d.name) for d in sorted(pred_root.iterdir()) if d.is_dir()]
        )
        for name, pred_dir, gt_dir in pairs:
            pred = _load_pred_sequence(pred_dir)
            gt = load_annotation_dir(gt_dir, args.object_id)
            report.add(evaluate_sequence(pred, gt.binary_masks(), sequence_id=name,
                                         video=name, tolerance=args.tolerance))
    _write_json(Path(args.out), report.to_json_obj())
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    print(f"J {report.j_mean:.4f}  F {report.f_mean:.4f}  J&F {report.jf:.4f}")
    return 0


def cmd_parse(args: argparse.Namespace) -> int:
    text = Path(args.infile).read_text(encoding="utf-8")
    warnings: list[str] = []
    try:
        selections = parse_output_list(text, args.t_prime, warn=warnings.append)
    except TranscriptParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({
        "selections": [
            {"object_index": s.object_index, "keyframe": s.candidate_index,
             "description": s.description}
            for s in selections
        ],
        "warnings": warnings,
    }, indent=2))
    return 0


def cmd_sample_grid(args: argparse.Namespace) -> int:
    clip = load_clip(args.frames)
    xi = compute_xi_offline(len(clip), args.target)
    plan = sample_candidates(clip, xi)
    grid = compose_grid(plan, clip, args.side_cap)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(grid.image, mode="RGB").save(out, format="PNG")
    print(json.dumps({
        "xi": plan.xi,
        "candidates": list(plan.candidate_frame_indices),
        "orientation": grid.orientation,
        "size": [grid.width, grid.height],
        "cells": [[r.x, r.y, r.width, r.height] for r in grid.cell_rects],
    }, indent=2))
    return 0


def cmd_mock_demo(args: argparse.Namespace) -> int:
    cfg = _resolve(args)
    scenarios = load_mock_scenarios(cfg.mock_fixture or None)
    name = cfg.mock_scenario
    if name not in scenarios:
        raise ConfigError(f"unknown mock scenario {name!r}; have: {', '.join(sorted(scenarios))}")
    scenario = scenarios[name]
    clip = scenario.build_clip()
    backends = scenario.build_backends()
    out = Path(args.out)

    if scenario.mode == "online":
        state = online_init(scenario.query, cfg.online_xi, backends)
        masks = [online_step(state, frame) for frame in clip.frames]
        online_finish(state)
        save_mask_dir(masks, out / "masks")
        with EventLog(out / "events.jsonl") as log:
            _flush_events(log, state.events)
        _write_json(out / "manifest.json", {
            "command": "mock-demo", "scenario": name, "mode": "online",
            "query": scenario.query, "xi": cfg.online_xi,
            "frames_processed": len(clip),
            "final_keyframe_index": state.keyframe_index,
            "warnings": state.warnings,
            "outputs": {"masks": "masks", "events": "events.jsonl"},
        })
    else:
        result = run_reasoning_vis(clip, scenario.query, backends, RunConfig())
        union = union_of_instances(result, clip)
        # Timings are excluded so repeated demo runs are byte-identical.
        _write_offline_outputs(out, result, union, mode="vis+vos",
                               query=scenario.query, include_timings=False)
        manifest = json.loads((out / "manifest.json").read_text("utf-8"))
        manifest["command"] = "mock-demo"
        manifest["scenario"] = name
        _write_json(out / "manifest.json", manifest)
    print(f"mock demo '{name}' complete, output in {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rvseg", description=__doc__)
    parser.add_argument("--version", action="version", version=f"rvseg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="offline instance/object segmentation run")
    p.add_argument("--frames", required=True, help="directory of ordered frame images")
    p.add_argument("--query", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=["vis", "vos"], default="vis")
    p.add_argument("--target", type=int, help="candidate count target (default 8)")
    p.add_argument("--side-cap", type=int, dest="side_cap", help="grid long-side cap in pixels")
    p.add_argument("--workers", type=int, help="per-instance fan-out limit")
    p.add_argument("--allow-overlap", action="store_true",
                   help="skip the non-overlap post-processing")
    _add_config_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("run-online", help="streaming object segmentation run")
    p.add_argument("--frames", help="directory of ordered frame images")
    p.add_argument("--stdin-frames", action="store_true",
                   help="read frame file paths from stdin, one per line")
    p.add_argument("--query", required=True)
    p.add_argument("--xi", type=int, help="judgment period (default 4)")
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_run_online)

    p = sub.add_parser("eval", help="J/F/J&F evaluation")
    p.add_argument("--pred", required=True, help="prediction mask directory")
    p.add_argument("--gt", help="ground-truth annotation directory")
    p.add_argument("--manifest", help="JSONL manifest of evaluation jobs")
    p.add_argument("--object-id", type=int, default=1, dest="object_id")
    p.add_argument("--tolerance", type=int, default=None, help="boundary tolerance in pixels")
    p.add_argument("--aggregate", choices=["record", "video"], default="record")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--csv", help="also write a CSV table")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("parse", help="parse a selector transcript")
    p.add_argument("--in", required=True, dest="infile", help="transcript text file")
    p.add_argument("--t-prime", required=True, type=int, dest="t_prime",
                   help="number of keyframe candidates")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("sample-grid", help="compose and export the candidate grid")
    p.add_argument("--frames", required=True)
    p.add_argument("--target", type=int, default=8)
    p.add_argument("--side-cap", type=int, default=1024, dest="side_cap")
    p.add_argument("--out", required=True, help="grid PNG path")
    p.set_defaults(func=cmd_sample_grid)

    p = sub.add_parser("mock-demo", help="end-to-end run on a scripted mock scenario")
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_mock_demo)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = getattr(args, "log_level", None) or "info"
    logging.basicConfig(level=level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PipelineError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
