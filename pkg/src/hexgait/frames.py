"""Binary frames and Boolean pooling primitives.

A BinaryFrame is an immutable 2-D bit grid; pooling reduces it with
non-overlapping k x k AND/OR tiles (binary min/max pooling).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, EmptyFrameError


@dataclass(frozen=True)
class Point:
    """Normalized image coordinate, both axes in [0, 1]."""

    x: float
    y: float

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0 and 0.0 <= self.y <= 1.0):
            raise ValueError(f"point ({self.x}, {self.y}) outside [0,1]^2")


@dataclass(frozen=True, eq=False)
class BinaryFrame:
    """Immutable boolean grid.

    `scale` is the pooling factor relative to the raw sensor frame
    (1 for raw, 2 after a 2x2 pool, 10 after a 10x10 pool, ...).
    """

    bits: np.ndarray
    scale: int = 1

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.ndim != 2:
            raise DimensionError(f"frame must be 2-D, got shape {bits.shape}")
        if self.scale < 1:
            raise ValueError(f"scale must be >= 1, got {self.scale}")
        bits = np.ascontiguousarray(bits)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @classmethod
    def zeros(cls, width: int, height: int, scale: int = 1) -> "BinaryFrame":
        return cls(np.zeros((height, width), dtype=bool), scale)

    def any(self) -> bool:
        return bool(self.bits.any())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryFrame):
            return NotImplemented
        return self.scale == other.scale and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.scale, self.bits.shape, self.bits.tobytes()))


@dataclass(frozen=True)
class FrameStream:
    """Ordered frames sharing one accumulation window and pooling scale.

    Frame k covers real time [k * window_ms, (k+1) * window_ms).
    """

    frames: tuple
    window_ms: float
    scale: int = 1

    def __post_init__(self):
        frames = tuple(self.frames)
        if self.window_ms <= 0:
            raise ValueError(f"window_ms must be > 0, got {self.window_ms}")
        for f in frames:
            if f.scale != self.scale:
                raise DimensionError(
                    f"frame scale {f.scale} != stream scale {self.scale}")
            if frames and (f.width != frames[0].width or f.height != frames[0].height):
                raise DimensionError("frames in a stream must share dimensions")
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)

    def __getitem__(self, i):
        return self.frames[i]


def _check_divisible(frame: BinaryFrame, k: int) -> None:
    if k < 1:
        raise ValueError(f"kernel size must be >= 1, got {k}")
    if frame.width % k or frame.height % k:
        raise DimensionError(
            f"frame {frame.width}x{frame.height} not divisible by kernel {k}")


def andpool(frame: BinaryFrame, k: int) -> BinaryFrame:
    """AND over non-overlapping k x k tiles (erosion-like, denoises)."""
    _check_divisible(frame, k)
    h, w = frame.height // k, frame.width // k
    tiled = frame.bits.reshape(h, k, w, k)
    return BinaryFrame(tiled.all(axis=(1, 3)), frame.scale * k)


def orpool(frame: BinaryFrame, k: int) -> BinaryFrame:
    """OR over non-overlapping k x k tiles (dilation-like, enhances)."""
    _check_divisible(frame, k)
    h, w = frame.height // k, frame.width // k
    tiled = frame.bits.reshape(h, k, w, k)
    return BinaryFrame(tiled.any(axis=(1, 3)), frame.scale * k)


def _check_same_dims(a: BinaryFrame, b: BinaryFrame) -> None:
    if a.bits.shape != b.bits.shape:
        raise DimensionError(
            f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}")


def frame_and(a: BinaryFrame, b: BinaryFrame) -> BinaryFrame:
    _check_same_dims(a, b)
    return BinaryFrame(a.bits & b.bits, a.scale)


def frame_or(a: BinaryFrame, b: BinaryFrame) -> BinaryFrame:
    _check_same_dims(a, b)
    return BinaryFrame(a.bits | b.bits, a.scale)


def frame_not(a: BinaryFrame) -> BinaryFrame:
    return BinaryFrame(~a.bits, a.scale)


def popcount(frame: BinaryFrame) -> int:
    """Number of set bits."""
    return int(frame.bits.sum())


def centroid(frame: BinaryFrame) -> Point:
    """Mean of set-bit coordinates, normalized to [0,1] per axis.

    Each axis is divided by (dimension - 1) so a single-bit frame maps the
    bit's pixel coordinates exactly; resolution-independent by design.
    """
    rows, cols = np.nonzero(frame.bits)
    if rows.size == 0:
        raise EmptyFrameError("centroid of an empty frame is undefined")
    x = float(cols.mean()) / (frame.width - 1) if frame.width > 1 else 0.0
    y = float(rows.mean()) / (frame.height - 1) if frame.height > 1 else 0.0
    return Point(x, y)


def write_pbm(frame: BinaryFrame, path) -> None:
    """Dump a frame as plain-text portable bitmap (magic P1)."""
    lines = ["P1", f"{frame.width} {frame.height}"]
    for row in frame.bits:
        lines.append(" ".join("1" if b else "0" for b in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_pbm(path, scale: int = 1) -> BinaryFrame:
    """Read a plain-text portable bitmap written by write_pbm."""
    with open(path) as fh:
        tokens = []
        for line in fh:
            line = line.split("#", 1)[0]
            tokens.extend(line.split())
    if not tokens or tokens[0] != "P1":
        raise ValueError(f"{path}: not a plain PBM (magic P1) file")
    width, height = int(tokens[1]), int(tokens[2])
    values = tokens[3:]
    if len(values) != width * height:
        raise ValueError(
            f"{path}: expected {width * height} bits, found {len(values)}")
    bits = np.array([v == "1" for v in values], dtype=bool).reshape(height, width)
    return BinaryFrame(bits, scale)
