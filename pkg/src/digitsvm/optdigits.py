"""Readers and converters for the UCI Optdigits file formats.

Two layouts exist upstream: the raw files (records of 32 lines with 32
'0'/'1' characters each, followed by a single label line) and the
preprocessed files (CSV lines of 64 block counts in 0..16 plus a label).
This module parses both, performs the 4x4 block-count downsampling that
turns a raw bitmap into the preprocessed form, and scales counts into
[0, 1] for kernel consumption.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

GRID = 32                      # raw bitmaps are GRID x GRID
BLOCK = 4                      # downsampling block edge
N_BLOCKS = GRID // BLOCK       # 8 blocks per side
N_BLOCK_FEATURES = N_BLOCKS * N_BLOCKS
MAX_COUNT = BLOCK * BLOCK      # 16 pixels per block
SCALE_DIVISOR = float(MAX_COUNT)

BLOCK64 = "block64"
MOMENT18 = "moment18"
FEATURE_DIMS = {BLOCK64: 64, MOMENT18: 18}


class FormatError(ValueError):
    """Malformed Optdigits input. Carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class RawBitmap:
    """A 32x32 binary digit image; `pixels` is a (32, 32) uint8 array of 0/1."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.shape != (GRID, GRID):
            raise ValueError(f"bitmap must be {GRID}x{GRID}, got {px.shape}")
        if not np.isin(px, (0, 1)).all():
            raise ValueError("bitmap cells must be 0 or 1")
        object.__setattr__(self, "pixels", px.astype(np.uint8))

    def to_lines(self) -> list[str]:
        return ["".join("1" if v else "0" for v in row) for row in self.pixels]


@dataclass(frozen=True)
class BlockFeatures:
    """64 on-pixel counts for the 8x8 grid of 4x4 blocks, row-major."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.shape != (N_BLOCK_FEATURES,):
            raise ValueError(f"expected {N_BLOCK_FEATURES} counts, got {c.shape}")
        if c.min() < 0 or c.max() > MAX_COUNT:
            raise ValueError(f"block counts must lie in [0, {MAX_COUNT}]")
        object.__setattr__(self, "counts", c.astype(np.int64))


@dataclass(frozen=True)
class Sample:
    """One labelled feature vector."""

    features: np.ndarray
    label: int


@dataclass
class Dataset:
    """A labelled dataset with uniform feature kind and dimension.

    Stored columnar: `x` is (n, d) float64, `y` is (n,) int64.
    """

    x: np.ndarray
    y: np.ndarray
    feature_kind: str = BLOCK64

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.x.ndim != 2 or len(self.x) != len(self.y):
            raise ValueError("features and labels must align as (n, d) and (n,)")
        if self.feature_kind not in FEATURE_DIMS:
            raise ValueError(f"unknown feature kind {self.feature_kind!r}")
        if len(self.x) and self.x.shape[1] != FEATURE_DIMS[self.feature_kind]:
            raise ValueError(
                f"{self.feature_kind} expects dimension "
                f"{FEATURE_DIMS[self.feature_kind]}, got {self.x.shape[1]}"
            )
        if len(self.y) and (self.y.min() < 0 or self.y.max() > 9):
            raise ValueError("labels must lie in 0..9")

    def __len__(self) -> int:
        return len(self.y)

    def __iter__(self) -> Iterator[Sample]:
        for xi, yi in zip(self.x, self.y):
            yield Sample(xi, int(yi))

    @classmethod
    def from_samples(cls, samples: Sequence[Sample], feature_kind: str = BLOCK64) -> "Dataset":
        if not samples:
            return cls(np.zeros((0, FEATURE_DIMS[feature_kind])), np.zeros(0), feature_kind)
        x = np.stack([np.asarray(s.features, dtype=np.float64) for s in samples])
        y = np.array([s.label for s in samples])
        return cls(x, y, feature_kind)

    def subset(self, indices: np.ndarray) -> "Dataset":
        return Dataset(self.x[indices], self.y[indices], self.feature_kind)


def _lines_of(text) -> Iterator[str]:
    if isinstance(text, str):
        return iter(io.StringIO(text))
    if isinstance(text, (Path,)):
        return iter(text.read_text().splitlines(keepends=True))
    return iter(text)  # file object or iterable of lines


def _is_bitmap_line(line: str) -> bool:
    return len(line) == GRID and set(line) <= {"0", "1"}


def parse_raw(text) -> list[tuple[RawBitmap, int]]:
    """Parse the UCI raw layout into (bitmap, label) records, in file order.

    Accepts a string, an open text file, or an iterable of lines. Free-text
    header lines before the first 32-character bitmap line are skipped.
    """
    records: list[tuple[RawBitmap, int]] = []
    rows: list[list[int]] = []
    row_start_line = 0
    started = False
    lineno = 0
    for raw_line in _lines_of(text):
        lineno += 1
        line = raw_line.rstrip("\r\n")
        if not started:
            if _is_bitmap_line(line):
                started = True
            else:
                continue  # header
        if not rows:
            if line.strip() == "":
                continue  # blank separator between records
            row_start_line = lineno
        if len(rows) < GRID:
            if not _is_bitmap_line(line):
                raise FormatError(
                    f"expected {GRID} characters of '0'/'1', got {line!r}", lineno
                )
            rows.append([int(ch) for ch in line])
            continue
        # label line
        stripped = line.strip()
        if not stripped.lstrip("-").isdigit():
            raise FormatError(f"expected integer label, got {line!r}", lineno)
        label = int(stripped)
        if not 0 <= label <= 9:
            raise FormatError(f"label {label} outside 0..9", lineno)
        records.append((RawBitmap(np.array(rows)), label))
        rows = []
    if rows:
        raise FormatError(
            f"truncated record: started at line {row_start_line}, "
            f"got {len(rows)} of {GRID} bitmap rows and no label",
            lineno,
        )
    return records


def parse_preprocessed(text) -> Dataset:
    """Parse the preprocessed CSV layout (64 counts in 0..16 plus a label)."""
    feats: list[list[int]] = []
    labels: list[int] = []
    lineno = 0
    for raw_line in _lines_of(text):
        lineno += 1
        line = raw_line.strip()
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != N_BLOCK_FEATURES + 1:
            raise FormatError(
                f"expected {N_BLOCK_FEATURES + 1} comma-separated fields, got {len(fields)}",
                lineno,
            )
        try:
            values = [int(f) for f in fields]
        except ValueError:
            raise FormatError(f"non-integer field in {line!r}", lineno) from None
        counts, label = values[:-1], values[-1]
        if min(counts) < 0 or max(counts) > MAX_COUNT:
            raise FormatError(f"block count outside 0..{MAX_COUNT}", lineno)
        if not 0 <= label <= 9:
            raise FormatError(f"label {label} outside 0..9", lineno)
        feats.append(counts)
        labels.append(label)
    if not feats:
        return Dataset(np.zeros((0, N_BLOCK_FEATURES)), np.zeros(0), BLOCK64)
    return Dataset(np.array(feats, dtype=np.float64), np.array(labels), BLOCK64)


def downsample(bitmap: RawBitmap) -> BlockFeatures:
    """Count on-pixels per non-overlapping 4x4 block, row-major 8x8."""
    px = bitmap.pixels
    counts = px.reshape(N_BLOCKS, BLOCK, N_BLOCKS, BLOCK).sum(axis=(1, 3))
    return BlockFeatures(counts.reshape(-1))


def scale_features(block: BlockFeatures) -> np.ndarray:
    """Map counts 0..16 onto [0, 1] by dividing by 16."""
    return block.counts.astype(np.float64) / SCALE_DIVISOR


# Scaling metadata recorded alongside persisted models, so the serving path
# can reproduce exactly the transform the training data went through.
SCALING_DIV16 = {"method": "divide", "divisor": SCALE_DIVISOR}
SCALING_NONE = {"method": "none"}


def apply_scaling(x: np.ndarray, scaling: dict) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    method = scaling.get("method", "none")
    if method == "none":
        return x
    if method == "divide":
        return x / float(scaling["divisor"])
    if method == "log1p":
        return np.sign(x) * np.log1p(np.abs(x))
    raise ValueError(f"unknown scaling method {method!r}")


def dataset_from_raw(records: Sequence[tuple[RawBitmap, int]]) -> Dataset:
    """Downsample raw records into an unscaled block64 dataset."""
    if not records:
        return Dataset(np.zeros((0, N_BLOCK_FEATURES)), np.zeros(0), BLOCK64)
    x = np.stack([downsample(bm).counts.astype(np.float64) for bm, _ in records])
    y = np.array([label for _, label in records])
    return Dataset(x, y, BLOCK64)


def write_preprocessed(records: Iterable[tuple[RawBitmap, int]], out) -> int:
    """Write records in the preprocessed CSV layout; returns the line count."""
    n = 0
    for bitmap, label in records:
        counts = downsample(bitmap).counts
        out.write(",".join(str(int(c)) for c in counts) + f",{label}\n")
        n += 1
    return n
