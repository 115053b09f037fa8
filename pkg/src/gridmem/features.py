"""Feature records, quantization into cue grids, and the feature file format.

A feature file is the contract between this library and whatever produces
the real-valued vectors (e.g. a neural feature extractor):

    #dtm-features v1 n=<n_features> lo=<lo> hi=<hi>
    <label>,<v1>,...,<vn>
    ...

Lines starting with '#' after the header are comments. Values are decimal
floats written with full round-trip precision.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import ParseError, ShapeError
from .grids import Grid, _parse_header

FEATURES_MAGIC = "#dtm-features"

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuantizationSpec:
    """Equal-width binning of [lo, hi] into ``levels`` rows."""

    levels: int
    lo: float
    hi: float
    n_features: int

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")
        if not self.hi > self.lo:
            raise ValueError(f"need hi > lo, got [{self.lo}, {self.hi}]")
        if self.n_features < 1:
            raise ValueError(f"n_features must be >= 1, got {self.n_features}")


class FeatureRecord(NamedTuple):
    label: str
    values: np.ndarray


class Dataset:
    """Labeled feature vectors with a declared value range.

    Stored columnar: ``values`` is an (n_records, n_features) float matrix,
    ``labels`` the matching label tuple.
    """

    def __init__(self, labels, values, lo: float, hi: float):
        self._labels = tuple(str(l) for l in labels)
        arr = np.array(values, dtype=float)
        if arr.ndim != 2:
            raise ShapeError(f"values must be 2-D, got {arr.ndim}-D")
        if arr.shape[0] != len(self._labels):
            raise ShapeError(
                f"{len(self._labels)} labels for {arr.shape[0]} value rows"
            )
        if arr.shape[1] < 1:
            raise ShapeError("records need at least one feature")
        if arr.size and not np.isfinite(arr).all():
            raise ValueError("feature values must be finite")
        if not hi > lo:
            raise ValueError(f"need hi > lo, got [{lo}, {hi}]")
        arr.setflags(write=False)
        self._values = arr
        self._lo = float(lo)
        self._hi = float(hi)

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def lo(self) -> float:
        return self._lo

    @property
    def hi(self) -> float:
        return self._hi

    @property
    def n_records(self) -> int:
        return self._values.shape[0]

    @property
    def n_features(self) -> int:
        return self._values.shape[1]

    def label_counts(self) -> dict[str, int]:
        return dict(Counter(self._labels))

    def record(self, i: int) -> FeatureRecord:
        return FeatureRecord(self._labels[i], self._values[i])

    def __len__(self) -> int:
        return self.n_records

    def __iter__(self) -> Iterator[FeatureRecord]:
        for i in range(self.n_records):
            yield self.record(i)

    def quantization_spec(self, levels: int) -> QuantizationSpec:
        return QuantizationSpec(levels, self._lo, self._hi, self.n_features)


def quantize_value(x: float, spec: QuantizationSpec) -> int:
    """Level of ``x`` in 1..levels; out-of-range values clamp to the range."""
    x = float(x)
    if math.isnan(x):
        raise ValueError("cannot quantize NaN")
    x = min(max(x, spec.lo), spec.hi)
    level = math.floor((x - spec.lo) * spec.levels / (spec.hi - spec.lo)) + 1
    return min(spec.levels, level)


def quantize_values(values, spec: QuantizationSpec) -> np.ndarray:
    """Vectorized quantize_value over an array; same clamping rule."""
    arr = np.asarray(values, dtype=float)
    if arr.size and np.isnan(arr).any():
        raise ValueError("cannot quantize NaN")
    arr = np.clip(arr, spec.lo, spec.hi)
    levels = np.floor((arr - spec.lo) * spec.levels / (spec.hi - spec.lo)).astype(int) + 1
    return np.minimum(spec.levels, levels)


def cue_from_record(rec, spec: QuantizationSpec) -> Grid:
    """Total function grid with one mark per feature at its quantized level."""
    values = np.asarray(rec.values if isinstance(rec, FeatureRecord) else rec,
                        dtype=float)
    if values.ndim != 1 or values.shape[0] != spec.n_features:
        raise ShapeError(
            f"record has {values.shape} values, spec declares {spec.n_features}"
        )
    levels = quantize_values(values, spec)
    marks = np.zeros((spec.n_features, spec.levels), dtype=bool)
    marks[np.arange(spec.n_features), levels - 1] = True
    return Grid(marks)


def cues_from_dataset(ds: Dataset, spec: QuantizationSpec) -> list[Grid]:
    """Cue grids for every record; logs how many values needed clamping."""
    if spec.n_features != ds.n_features:
        raise ShapeError(
            f"dataset has {ds.n_features} features, spec declares {spec.n_features}"
        )
    clamped = int(((ds.values < spec.lo) | (ds.values > spec.hi)).sum())
    if clamped:
        log.info("%d of %d feature values fell outside [%g, %g] and were clamped",
                 clamped, ds.values.size, spec.lo, spec.hi)
    return [cue_from_record(rec, spec) for rec in ds]


# -- feature file format -------------------------------------------------


def _format_float(v: float) -> str:
    return repr(float(v))


def dataset_to_text(ds: Dataset) -> str:
    lines = [f"{FEATURES_MAGIC} v1 n={ds.n_features} "
             f"lo={_format_float(ds.lo)} hi={_format_float(ds.hi)}"]
    for label, row in zip(ds.labels, ds.values):
        lines.append(label + "," + ",".join(_format_float(v) for v in row))
    return "\n".join(lines) + "\n"


def dataset_from_text(text: str) -> Dataset:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError("empty feature file", 1)
    fields = _parse_header(lines[0], FEATURES_MAGIC)
    try:
        n = int(fields["n"])
        lo = float(fields["lo"])
        hi = float(fields["hi"])
    except KeyError as exc:
        raise ParseError(f"header is missing the {exc.args[0]}= field", 1) from None
    except ValueError as exc:
        raise ParseError(f"bad header field: {exc}", 1) from None
    if n < 1:
        raise ParseError(f"n must be positive, got {n}", 1)
    if not hi > lo:
        raise ParseError(f"need hi > lo, got lo={lo} hi={hi}", 1)

    labels: list[str] = []
    rows: list[np.ndarray] = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        if line.startswith("#"):
            continue  # comment, e.g. extractor provenance
        parts = line.split(",")
        if not parts[0]:
            raise ParseError("record is missing its label", line_no)
        if len(parts) - 1 != n:
            raise ParseError(
                f"expected {n} values, found {len(parts) - 1}", line_no)
        try:
            row = np.array([float(p) for p in parts[1:]], dtype=float)
        except ValueError:
            raise ParseError("non-numeric feature value", line_no) from None
        if not np.isfinite(row).all():
            raise ParseError("non-finite feature value", line_no)
        rows.append(row)
        labels.append(parts[0])
    values = np.array(rows, dtype=float) if rows else np.empty((0, n), dtype=float)
    return Dataset(labels, values, lo, hi)


def load_dataset(path) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        return dataset_from_text(fh.read())


def save_dataset(ds: Dataset, path) -> None:
    from ._files import atomic_write_text

    atomic_write_text(path, dataset_to_text(ds))
