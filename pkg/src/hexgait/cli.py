"""Command-line pipeline: synth | train | test | energy | repro.

Exit codes: 0 success, 2 config error, 3 data error, 4 end-to-end check
failure (repro only).
"""
from __future__ import annotations

import argparse
import os
import sys
import tempfile

import numpy as np

from . import events as ev
from .config import EXAMPLE_CONFIG, RunConfig, default_config, load_config
from .energy import energy_report
from .errors import ConfigError, DataError, HexgaitError
from .frames import andpool, popcount
from .gait import (format_sequence, format_trace, is_tripod, label_sequence,
                   sequence_accuracy, spikes_to_gait)
from .neurons import (WeightMap, load_raster, load_weights, run_network,
                      save_raster, save_weights)
from .scene import (GaitSchedule, ground_truth_raster, render_expert_sequence,
                    segment_boundaries, splice_segments)
from .training import calibrate_priors, train
import math


def _write_atomic(path, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _ensure_out(cfg: RunConfig, override=None) -> str:
    out = override or cfg["run"]["out"]
    os.makedirs(out, exist_ok=True)
    return out


def _synth_stream(cfg: RunConfig):
    schedule = GaitSchedule.sequential()
    stream = render_expert_sequence(
        cfg.geometry(), schedule,
        frames_per_cycle=cfg["scene"]["frames_per_cycle"],
        width=cfg["scene"]["width"], height=cfg["scene"]["height"],
        noise_density=cfg["scene"]["noise_density"], seed=cfg.seed,
        window_ms=cfg["events"]["window_ms"], params=cfg.render_params())
    return schedule, stream


def _schedule_text(cfg: RunConfig, schedule: GaitSchedule) -> str:
    lines = [
        f"frames_per_cycle={cfg['scene']['frames_per_cycle']}",
        f"gap_frames={cfg['scene']['gap_frames']}",
    ]
    for i, legs in schedule.entries:
        lines.append(f"step {i} {','.join(str(l) for l in sorted(legs))}")
    return "\n".join(lines) + "\n"


def _load_schedule(path) -> GaitSchedule:
    entries = []
    try:
        with open(path) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if line.startswith("step "):
                    _, idx, legs = line.split()
                    entries.append((int(idx), {int(l) for l in legs.split(",")}))
    except (OSError, ValueError) as exc:
        raise DataError(f"bad schedule file {path}: {exc}") from exc
    if not entries:
        raise DataError(f"schedule file {path} has no steps")
    return GaitSchedule(tuple(entries))


def _ingest_events(cfg: RunConfig, path):
    """Load an event file and accumulate it at the configured frame size."""
    evts, sw, sh = ev.load_events(path)
    width, height = cfg["scene"]["width"], cfg["scene"]["height"]
    if (sw, sh) != (width, height):
        left, top = ev.centered_crop(sw, sh, width, height)
        evts = ev.crop_events(evts, left, top, width, height)
    return ev.accumulate_frames(evts, cfg["events"]["window_ms"], width, height)


def cmd_synth(cfg: RunConfig, out: str) -> int:
    schedule, stream = _synth_stream(cfg)
    evts = ev.frames_to_events(stream)
    ev.save_events(os.path.join(out, "events.txt"), evts,
                   cfg["scene"]["width"], cfg["scene"]["height"])
    _write_atomic(os.path.join(out, "schedule.txt"),
                  _schedule_text(cfg, schedule))
    print(f"wrote {len(evts)} events over {len(stream)} frames to {out}/events.txt")
    return 0


def cmd_train(cfg: RunConfig, out: str, events_path) -> int:
    stream = _ingest_events(cfg, events_path)
    priors = calibrate_priors(cfg.geometry(),
                              std=math.radians(cfg["training"]["prior_std_deg"]))
    result = train(stream, priors, cfg.train_schedule(), cfg.neuron_params(),
                   repeats=cfg["training"]["repeats"])
    save_weights(os.path.join(out, "weights.txt"), result.weights)
    save_raster(os.path.join(out, "train_raster.txt"), result.raster)
    _write_atomic(os.path.join(out, "train_log.txt"),
                  "# t_sec leg theta_rad p m popcount_i10\n"
                  + "\n".join(result.log) + "\n")
    print(f"trained for {result.duration_s:.1f} simulated s "
          f"({result.skipped} frames skipped); weights in {out}/weights.txt")
    return 0


def _run_frozen(cfg: RunConfig, weights: WeightMap, stream):
    i10_frames = [andpool(f, 10) for f in stream.frames]
    _, raster = run_network(i10_frames, weights, cfg.neuron_params())
    return i10_frames, raster


def cmd_test(cfg: RunConfig, out: str, weights_path, events_path,
             schedule_path=None) -> int:
    weights = load_weights(weights_path)
    stream = _ingest_events(cfg, events_path)
    _, raster = _run_frozen(cfg, weights, stream)
    save_raster(os.path.join(out, "test_raster.txt"), raster)
    trace = spikes_to_gait(raster, cfg.period_s())
    _write_atomic(os.path.join(out, "gait_trace.txt"), format_trace(trace))
    sequence = label_sequence(raster, cfg.group_gap_s())
    report = [format_sequence(sequence).rstrip()]
    report.append(f"is_tripod={is_tripod(sequence)}")
    if schedule_path:
        expected = [set(legs) for _, legs in _load_schedule(schedule_path).entries]
        report.append(f"sequence_accuracy={sequence_accuracy(sequence, expected):.6f}")
    _write_atomic(os.path.join(out, "report.txt"), "\n".join(report) + "\n")
    print("\n".join(report))
    return 0


def cmd_energy(cfg: RunConfig, raster_path, active_frames: int,
               leg_events: int) -> int:
    raster = load_raster(raster_path)
    rep = energy_report(raster.total_spikes(), active_frames, leg_events,
                        cfg.energy_model())
    print(rep.format(), end="")
    return 0


def _leg_event_counts(i10_frames):
    """Canonical per-leg-event accounting: peak pixel count of each burst
    of consecutive active frames, one filter application per burst."""
    n_spikes = n_events = 0
    peak = 0
    for f in i10_frames:
        c = popcount(f)
        if c:
            peak = max(peak, c)
        elif peak:
            n_spikes += peak
            n_events += 1
            peak = 0
    if peak:
        n_spikes += peak
        n_events += 1
    return n_spikes, n_events


def cmd_repro(cfg: RunConfig, out: str) -> int:
    """One-shot pipeline: synth -> train -> splice tripod -> frozen test."""
    schedule, stream = _synth_stream(cfg)
    evts = ev.frames_to_events(stream)
    ev.save_events(os.path.join(out, "events.txt"), evts,
                   cfg["scene"]["width"], cfg["scene"]["height"])
    _write_atomic(os.path.join(out, "schedule.txt"), _schedule_text(cfg, schedule))

    priors = calibrate_priors(cfg.geometry(),
                              std=math.radians(cfg["training"]["prior_std_deg"]))
    result = train(stream, priors, cfg.train_schedule(), cfg.neuron_params(),
                   repeats=cfg["training"]["repeats"])
    save_weights(os.path.join(out, "weights.txt"), result.weights)
    save_raster(os.path.join(out, "train_raster.txt"), result.raster)

    gap_s = cfg.group_gap_s()
    fpc = cfg["scene"]["frames_per_cycle"]

    # Frozen test on one further repetition of the training video.
    _, seq_raster = _run_frozen(cfg, result.weights, stream)
    save_raster(os.path.join(out, "seq_raster.txt"), seq_raster)
    seq_observed = label_sequence(seq_raster, gap_s)
    seq_expected = [set(legs) for _, legs in schedule.entries]
    seq_acc = sequence_accuracy(seq_observed, seq_expected)

    # Splice the training footage into a tripod gait and test, still frozen.
    bounds = segment_boundaries(schedule, fpc, cfg.render_params())
    tripod_schedule = GaitSchedule.tripod(cfg["test"]["tripod_repeats"])
    tripod_stream = splice_segments(stream, bounds, tripod_schedule)
    i10_frames, tri_raster = _run_frozen(cfg, result.weights, tripod_stream)
    save_raster(os.path.join(out, "tripod_raster.txt"), tri_raster)
    trace = spikes_to_gait(tri_raster, cfg.period_s())
    _write_atomic(os.path.join(out, "tripod_trace.txt"), format_trace(trace))
    tri_observed = label_sequence(tri_raster, gap_s)
    tri_expected = [set(legs) for _, legs in tripod_schedule.entries]
    tri_acc = sequence_accuracy(tri_observed, tri_expected)
    tripod_ok = is_tripod(tri_observed)

    n_spikes, n_events = _leg_event_counts(i10_frames)
    erep = energy_report(n_spikes, n_events, n_events, cfg.energy_model())

    report = [
        f"train_duration_s={result.duration_s:.2f}",
        f"train_repeats={cfg['training']['repeats']}",
        f"train_skipped_frames={result.skipped}",
        f"sequence_accuracy={seq_acc:.6f}",
        f"tripod_accuracy={tri_acc:.6f}",
        f"is_tripod={tripod_ok}",
        erep.format().rstrip(),
    ]
    _write_atomic(os.path.join(out, "report.txt"), "\n".join(report) + "\n")
    print("\n".join(report))
    if seq_acc != 1.0 or tri_acc != 1.0 or not tripod_ok:
        print("repro check FAILED", file=sys.stderr)
        return 4
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hexgait",
        description="Imitation gait learning on synthetic event-camera footage")
    parser.add_argument("--config", metavar="PATH", help="key=value config file")
    parser.add_argument("--out", metavar="DIR", help="output directory override")
    parser.add_argument("--seed", type=int, help="seed override")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("synth", help="render the expert video as an event file")

    p = sub.add_parser("train", help="train the network on an event file")
    p.add_argument("events", help="event file (x,y,t_us per line)")

    p = sub.add_parser("test", help="run a frozen network over an event file")
    p.add_argument("weights", help="trained weight file")
    p.add_argument("events", help="event file")
    p.add_argument("--schedule", help="expected schedule file for scoring")

    p = sub.add_parser("energy", help="energy estimate for a raster")
    p.add_argument("raster", help="raster file (time_s neuron pairs)")
    p.add_argument("--active-frames", type=int, default=0)
    p.add_argument("--leg-events", type=int, default=0)

    sub.add_parser("repro", help="full synth/train/splice/test pipeline")

    p = sub.add_parser("example-config", help="print the annotated default config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else default_config()
        if args.seed is not None:
            cfg.values["run"]["seed"] = args.seed
        if args.command == "example-config":
            print(EXAMPLE_CONFIG, end="")
            return 0
        out = _ensure_out(cfg, args.out)
        if args.command == "synth":
            return cmd_synth(cfg, out)
        if args.command == "train":
            return cmd_train(cfg, out, args.events)
        if args.command == "test":
            return cmd_test(cfg, out, args.weights, args.events, args.schedule)
        if args.command == "energy":
            return cmd_energy(cfg, args.raster, args.active_frames, args.leg_events)
        if args.command == "repro":
            return cmd_repro(cfg, out)
        raise ConfigError(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except HexgaitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
