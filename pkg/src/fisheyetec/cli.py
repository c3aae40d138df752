"""Command-line entry point.

Three subcommands: ``run`` executes a configured concealment experiment,
``synth`` renders a configured synthetic sequence to disk, and
``report`` prints the summary table of a finished run. All state flows
through the config file; the few CLI flags are reproducibility
overrides, not a second configuration channel.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .loss_model import InfeasiblePattern
from .pipeline import (
    ConfigError,
    ExperimentConfig,
    TruncatedFile,
    UnknownFormat,
    append_yuv,
    run_experiment,
    synthetic_from_config,
    write_pgm,
)

log = logging.getLogger("fisheyetec")


def _parse_frames(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return int(a), int(b)
        single = int(text)
        return single, single
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected A..B or a single frame index, got {text!r}"
        ) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conceal",
        description="Temporal error concealment for equisolid fisheye video.",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log per-frame progress"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a concealment experiment")
    run.add_argument("--config", required=True, help="JSON experiment config")
    run.add_argument(
        "--engine",
        choices=["dmve", "etec", "hybrid"],
        help="override the configured engine selection",
    )
    run.add_argument("--seed", type=int, help="override the loss placement seed")
    run.add_argument(
        "--frames", type=_parse_frames, help="frame range A..B (inclusive)"
    )
    run.add_argument("--out", help="override the output directory")

    synth = sub.add_parser("synth", help="render the configured synthetic sequence")
    synth.add_argument("--config", required=True, help="JSON experiment config")
    synth.add_argument("--out", help="override the output directory")

    report = sub.add_parser("report", help="print the summary of a finished run")
    report.add_argument(
        "--in", dest="in_dir", required=True, help="directory holding report.json"
    )
    return parser


def _fmt_db(value) -> str:
    if value is None:
        return "      --"
    return f"{value:8.2f}"


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    cfg = cfg.with_overrides(
        engine=args.engine, seed=args.seed, frames=args.frames, out_dir=args.out
    )
    result = run_experiment(cfg)
    summary = result.summary
    print(f"report: {result.report_path}")
    print(
        f"frames scored: {summary.scored_frames}/{summary.frames}   "
        f"blocks: {summary.etec_blocks} etec / {summary.dmve_blocks} dmve"
    )
    if summary.mean_psnr_dmve is not None:
        print(f"mean PSNR dmve : {summary.mean_psnr_dmve:8.2f} dB")
    if summary.mean_psnr_hetec is not None:
        print(f"mean PSNR hetec: {summary.mean_psnr_hetec:8.2f} dB")
    if summary.mean_gain is not None:
        print(
            f"mean gain      : {summary.mean_gain:+8.2f} dB   "
            f"(max {summary.max_gain:+.2f} dB at frame {summary.max_gain_frame})"
        )
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    if args.out is not None:
        cfg = cfg.with_overrides(out_dir=args.out)
    if cfg.fmt != "synthetic":
        raise ConfigError("synth requires input.format == 'synthetic'")
    frames = synthetic_from_config(cfg)
    os.makedirs(cfg.out_dir, exist_ok=True)
    yuv_path = os.path.join(cfg.out_dir, "synthetic.yuv")
    with open(yuv_path, "wb") as handle:
        for index, frame in enumerate(frames):
            write_pgm(
                os.path.join(cfg.out_dir, f"synthetic_f{index:04d}.pgm"), frame.y
            )
            append_yuv(handle, frame)
    print(f"wrote {len(frames)} frames to {cfg.out_dir} (pgm + synthetic.yuv)")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    path = os.path.join(args.in_dir, "report.json")
    with open(path, "r", encoding="utf-8") as handle:
        report = json.load(handle)
    print(f"{'frame':>5}  {'psnr_dmve':>9}  {'psnr_hetec':>10}  {'gain':>8}")
    for row in report["frames"]:
        gain = row.get("gain")
        print(
            f"{row['frame_index']:>5}  {_fmt_db(row.get('psnr_dmve')):>9}  "
            f"{_fmt_db(row.get('psnr_hetec')):>10}  "
            f"{('%+8.2f' % gain) if gain is not None else '      --'}"
        )
    summary = report["summary"]
    print()
    print(
        f"mean  {_fmt_db(summary['mean_psnr_dmve']):>9}  "
        f"{_fmt_db(summary['mean_psnr_hetec']):>10}  "
        + (
            f"{summary['mean_gain']:+8.2f}"
            if summary["mean_gain"] is not None
            else "      --"
        )
    )
    if summary.get("etec_fraction") is not None:
        print(
            f"blocks: {summary['etec_blocks']} etec / {summary['dmve_blocks']} dmve "
            f"({100.0 * summary['etec_fraction']:.1f}% etec)"
        )
    if summary.get("max_gain") is not None:
        print(
            f"max gain: {summary['max_gain']:+.2f} dB at frame "
            f"{summary['max_gain_frame']}"
        )
    return 0


def main(argv: "list[str] | None" = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handlers = {"run": _cmd_run, "synth": _cmd_synth, "report": _cmd_report}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (TruncatedFile, UnknownFormat, InfeasiblePattern, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
