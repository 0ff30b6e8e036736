"""Event streams: accumulation into binary frames, file I/O, cropping.

The on-disk format is plain text, one `x,y,t_us` triple per line, `#`
comments, and a sidecar header line `!sensor WxH`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EventBoundsError, EventFileError
from .frames import BinaryFrame, FrameStream


@dataclass(frozen=True)
class Event:
    """One asynchronous pixel event: column, row, timestamp in microseconds."""

    x: int
    y: int
    t: int

    def __post_init__(self):
        if self.x < 0 or self.y < 0 or self.t < 0:
            raise ValueError(f"event fields must be >= 0: {self}")


def accumulate_frames(events, window_ms: float, width: int, height: int) -> FrameStream:
    """OR-accumulate events into binary frames of `window_ms` each.

    Frame count is ceil((t_max + 1) / window_us) for nonempty input, 0 for
    empty input. Any event in window k sets its pixel's bit in frame k.
    """
    if window_ms <= 0:
        raise ValueError(f"window_ms must be > 0, got {window_ms}")
    events = list(events)
    if not events:
        return FrameStream((), window_ms)
    for i, ev in enumerate(events):
        if not (0 <= ev.x < width and 0 <= ev.y < height):
            raise EventBoundsError(
                i, f"event {i} at ({ev.x},{ev.y}) outside {width}x{height} sensor")
    window_us = int(round(window_ms * 1000))
    xs = np.array([ev.x for ev in events])
    ys = np.array([ev.y for ev in events])
    ts = np.array([ev.t for ev in events], dtype=np.int64)
    n_frames = int(ts.max()) // window_us + 1
    bits = np.zeros((n_frames, height, width), dtype=bool)
    bits[ts // window_us, ys, xs] = True
    frames = tuple(BinaryFrame(b) for b in bits)
    return FrameStream(frames, window_ms)


def frames_to_events(stream: FrameStream) -> list:
    """Invert accumulation: one event per set pixel, mid-window timestamp."""
    window_us = int(round(stream.window_ms * 1000))
    out = []
    for k, frame in enumerate(stream.frames):
        t = k * window_us + window_us // 2
        rows, cols = np.nonzero(frame.bits)
        out.extend(Event(int(x), int(y), t) for x, y in zip(cols, rows))
    return out


def crop_events(events, left: int, top: int, width: int, height: int) -> list:
    """Keep events inside the crop region and rebase coordinates to it."""
    return [
        Event(ev.x - left, ev.y - top, ev.t)
        for ev in events
        if left <= ev.x < left + width and top <= ev.y < top + height
    ]


def centered_crop(sensor_w: int, sensor_h: int, width: int, height: int):
    """(left, top) of a centered width x height region of the sensor."""
    if width > sensor_w or height > sensor_h:
        raise ValueError(
            f"crop {width}x{height} larger than sensor {sensor_w}x{sensor_h}")
    return (sensor_w - width) // 2, (sensor_h - height) // 2


def save_events(path, events, sensor_w: int, sensor_h: int) -> None:
    with open(path, "w") as fh:
        fh.write(f"!sensor {sensor_w}x{sensor_h}\n")
        for ev in events:
            fh.write(f"{ev.x},{ev.y},{ev.t}\n")


def load_events(path):
    """Read an event file. Returns (events, sensor_w, sensor_h).

    Events are sorted by timestamp on ingest; the format permits
    non-strict ordering.
    """
    events = []
    sensor = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("!sensor"):
                try:
                    dims = line.split(None, 1)[1]
                    w, h = dims.lower().split("x")
                    sensor = (int(w), int(h))
                except (IndexError, ValueError):
                    raise EventFileError(lineno, f"line {lineno}: bad sensor header {line!r}")
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise EventFileError(lineno, f"line {lineno}: expected x,y,t_us, got {line!r}")
            try:
                ev = Event(int(parts[0]), int(parts[1]), int(parts[2]))
            except ValueError:
                raise EventFileError(lineno, f"line {lineno}: bad event {line!r}")
            events.append(ev)
    if sensor is None:
        raise EventFileError(0, "missing !sensor WxH header")
    events.sort(key=lambda ev: ev.t)
    return events, sensor[0], sensor[1]
