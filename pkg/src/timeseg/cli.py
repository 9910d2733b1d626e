"""Command-line surface: batch scoring, benchmark evaluation, simulation, parser debugging."""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .intervals import SegmentSet
from .metrics import miou, multi_segment_f1, per_record_csv, read_records
from .parsing import parse_output
from .rewards import RewardConfig, compute_reward, config_from_mapping, load_config
from .sim import SimulationConfig, run_simulation

CONFIG_ENV_VAR = "TIMESEG_CONFIG"


def _resolve_config(args: argparse.Namespace) -> RewardConfig:
    """Flag > config file > built-in default."""
    cfg = RewardConfig()
    path = args.config or os.environ.get(CONFIG_ENV_VAR)
    if path:
        cfg = load_config(path, cfg)
    overrides = {}
    for flag, key in (
        ("alpha", "alpha"),
        ("beta", "beta"),
        ("strategy", "strategy"),
        ("phase_switch", "phase_switch_step"),
        ("tolerance", "timestamp_tolerance"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    if overrides:
        cfg = config_from_mapping(overrides, cfg)
    return cfg


def cmd_score(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    try:
        with open(args.input, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return 2

    n_errors = 0
    sums = {"r_match": 0.0, "r_timestamp": 0.0, "r_format": 0.0, "total": 0.0}
    n_scored = 0
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            record_id = str(obj["id"])
            gt = SegmentSet.from_pairs(obj["gt"])
            raw_output = obj["raw_output"]
            if not isinstance(raw_output, str):
                raise TypeError("raw_output must be a string")
        except (KeyError, TypeError, ValueError) as exc:
            n_errors += 1
            print(json.dumps({"line": lineno, "error": f"{exc}"}))
            continue
        breakdown = compute_reward(gt, raw_output, args.step, cfg)
        print(json.dumps({"id": record_id, **breakdown.as_dict()}))
        n_scored += 1
        sums["r_match"] += breakdown.r_match
        sums["r_timestamp"] += breakdown.r_timestamp
        sums["r_format"] += breakdown.r_format
        sums["total"] += breakdown.total

    summary = {"n_records": n_scored, "n_errors": n_errors}
    if n_scored:
        summary.update({f"mean_{k}": v / n_scored for k, v in sums.items()})
    print(json.dumps({"summary": summary}))
    return 1 if n_errors else 0


def cmd_eval(args: argparse.Namespace) -> int:
    try:
        with open(args.input, encoding="utf-8") as fh:
            records = read_records(fh)
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not records:
        print("error: no records in input", file=sys.stderr)
        return 2

    if args.kind == "single":
        for rec in records:
            if len(rec.gt) > 1:
                print(f"warning: record {rec.id} has multi-segment gt under kind=single", file=sys.stderr)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            report_obj = {"n_records": len(records), "miou": miou(records)}
    else:
        report_obj = multi_segment_f1(records).as_dict()
    print(json.dumps(report_obj))

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(per_record_csv(records))
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        cfg = _resolve_config(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sim = SimulationConfig(steps=args.steps)
    log = run_simulation(cfg, sim, seed=args.seed)
    if args.out:
        log.write_csv(args.out)
    else:
        sys.stdout.write(log.to_csv())

    window = log.records[-min(100, len(log.records)) :]
    if window:
        summary = {
            "steps": len(log.records),
            "final_window": len(window),
            "mean_r_match": float(np.mean([r.mean_r_match for r in window])),
            "mean_r_timestamp": float(np.mean([r.mean_r_timestamp for r in window])),
            "mean_count_gap": float(np.mean([r.mean_count_gap for r in window])),
        }
        print(json.dumps({"summary": summary}))
    return 0


def cmd_parse(args: argparse.Namespace) -> int:
    raw = args.text if args.text is not None else sys.stdin.read()
    output = parse_output(raw)
    print(
        json.dumps(
            {
                "well_formed": output.well_formed,
                "think": output.think,
                "answer": output.answer,
                "answer_segments": output.answer_segments.to_pairs()
                if output.answer_segments is not None
                else None,
                "answer_timestamps": list(output.answer_timestamps),
                "reasoning_timestamps": list(output.reasoning_timestamps),
            }
        )
    )
    return 0


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV_VAR})")
    parser.add_argument("--alpha", type=float, help="weight of the segment matching reward")
    parser.add_argument("--beta", type=float, help="phase-1 weight of the timestamp reward")
    parser.add_argument(
        "--strategy", choices=["sequential", "maximum", "global"], help="local matching strategy"
    )
    parser.add_argument("--phase-switch", dest="phase_switch", type=int, help="last step of phase 1")
    parser.add_argument("--tolerance", type=float, help="timestamp match tolerance in seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="timeseg",
        description="Reward scoring, grounding metrics, and a reward-schedule sandbox for time segments.",
    )
    parser.add_argument("--version", action="version", version=f"timeseg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score raw model outputs against ground-truth segments")
    p_score.add_argument("input", help="JSONL file with id, gt, raw_output per line")
    p_score.add_argument("--step", type=int, default=1, help="training step for phase selection")
    _add_config_flags(p_score)
    p_score.set_defaults(func=cmd_score)

    p_eval = sub.add_parser("eval", help="compute grounding metrics over predictions")
    p_eval.add_argument("input", help="JSONL file with id, gt, pred per line")
    p_eval.add_argument("--kind", choices=["single", "multi"], required=True)
    p_eval.add_argument("--out", help="write per-record scores to this CSV file")
    p_eval.set_defaults(func=cmd_eval)

    p_sim = sub.add_parser("simulate", help="run the group-relative training sandbox")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--steps", type=int, default=600)
    p_sim.add_argument("--out", help="write the training log CSV here (default: stdout)")
    _add_config_flags(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_parse = sub.add_parser("parse", help="debug-parse one raw output")
    p_parse.add_argument("text", nargs="?", help="raw output text (default: stdin)")
    p_parse.set_defaults(func=cmd_parse)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
