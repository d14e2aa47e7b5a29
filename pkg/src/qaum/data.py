"""HTRU2 ingestion, angle scaling and balanced sampling."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import ConfigurationError, DataError, DegenerateScaleError, ParseError

N_FEATURES = 8

HTRU2_COLUMNS = (
    "profile_mean",
    "profile_std",
    "profile_kurtosis",
    "profile_skewness",
    "dmsnr_mean",
    "dmsnr_std",
    "dmsnr_kurtosis",
    "dmsnr_skewness",
)


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Feature matrix plus 0/1 labels.

    ``scaling`` holds the per-feature ``(min, max)`` pairs, shape
    ``(n_features, 2)``, once the features have been mapped to ``[0, pi]``.
    """

    features: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    scaling: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        x = np.array(self.features, dtype=float)
        y = np.array(self.labels, dtype=np.int64)
        if x.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {x.shape}")
        if y.shape != (x.shape[0],):
            raise DataError(f"{y.shape} labels for {x.shape[0]} rows")
        if not np.isin(y, (0, 1)).all():
            raise DataError("labels must be 0 or 1")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)
        if self.scaling is not None:
            s = np.array(self.scaling, dtype=float)
            if s.shape != (x.shape[1], 2):
                raise DataError(f"scaling must have shape ({x.shape[1]}, 2), got {s.shape}")
            s.setflags(write=False)
            object.__setattr__(self, "scaling", s)

    def __len__(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    def class_counts(self) -> dict:
        return {0: int(np.sum(self.labels == 0)), 1: int(np.sum(self.labels == 1))}

    def subset(self, indices) -> "LabeledDataset":
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.features[idx], self.labels[idx], self.scaling)


@dataclass(frozen=True)
class SampleSpec:
    size: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.size < 2 or self.size % 2:
            raise ConfigurationError(f"sample size must be a positive even number, got {self.size}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError(f"seed must fit in 64 bits, got {self.seed}")


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; identical draws on every platform for a given seed."""
    return np.random.Generator(np.random.PCG64(seed))


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def load_csv(path, n_features: int = N_FEATURES) -> LabeledDataset:
    """Read ``n_features`` float columns plus an integer label; no header."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such data file: {path}")
    rows, labels = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != n_features + 1:
                raise ParseError(
                    f"{path}:{lineno}: expected {n_features + 1} columns, got {len(row)}", row=lineno
                )
            try:
                values = [float(cell) for cell in row[:n_features]]
                label = float(row[n_features])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}", row=lineno) from None
            if label not in (0.0, 1.0) or not all(math.isfinite(v) for v in values):
                raise ParseError(f"{path}:{lineno}: bad label or non-finite feature", row=lineno)
            rows.append(values)
            labels.append(int(label))
    features = np.array(rows, dtype=float).reshape(len(rows), n_features)
    return LabeledDataset(features, np.array(labels, dtype=np.int64))


def scale_features(features, scaling) -> np.ndarray:
    """``pi * (x - min) / (max - min)`` column-wise."""
    scaling = np.asarray(scaling, dtype=float)
    lo, hi = scaling[:, 0], scaling[:, 1]
    return np.pi * (np.asarray(features, dtype=float) - lo) / (hi - lo)


def fit_scale(dataset: LabeledDataset) -> LabeledDataset:
    """Map every feature onto ``[0, pi]`` using bounds fit on ``dataset``."""
    if len(dataset) == 0:
        raise DataError("cannot fit scaling on an empty dataset")
    lo = dataset.features.min(axis=0)
    hi = dataset.features.max(axis=0)
    flat = np.flatnonzero(hi <= lo)
    if flat.size:
        raise DegenerateScaleError(f"constant feature column(s) {flat.tolist()}")
    scaling = np.column_stack([lo, hi])
    return LabeledDataset(scale_features(dataset.features, scaling), dataset.labels, scaling)


def apply_scale(dataset: LabeledDataset, scaling) -> LabeledDataset:
    """Scale held-out data with bounds fit elsewhere."""
    scaling = np.asarray(scaling, dtype=float)
    return LabeledDataset(scale_features(dataset.features, scaling), dataset.labels, scaling)


def balanced_sample(dataset: LabeledDataset, spec: SampleSpec):
    """Balanced training sample and a disjoint balanced holdout of equal size.

    Each class contributes ``size // 2`` rows to both sets, drawn without
    replacement.  Returns ``(train, holdout)``.
    """
    half = spec.size // 2
    counts = dataset.class_counts()
    if min(counts.values()) < 2 * half:
        raise ConfigurationError(
            f"sample size {spec.size} needs {2 * half} rows of each class for train+holdout; "
            f"class counts are {counts}"
        )
    rng = make_rng(spec.seed)
    train_idx, hold_idx = [], []
    for cls in (0, 1):
        pool = np.flatnonzero(dataset.labels == cls)
        picked = rng.choice(pool, size=2 * half, replace=False)
        train_idx.append(np.sort(picked[:half]))
        hold_idx.append(np.sort(picked[half:]))
    return dataset.subset(np.concatenate(train_idx)), dataset.subset(np.concatenate(hold_idx))


def save_snapshot(dataset: LabeledDataset, path, seed=None, source=None) -> tuple[Path, Path]:
    """Write a dataset as CSV plus a sidecar JSON of scaling bounds and provenance."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(HTRU2_COLUMNS) if dataset.n_features == N_FEATURES else [
        f"f{i}" for i in range(dataset.n_features)
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names + ["label"])
        for row, label in zip(dataset.features, dataset.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])
    sidecar = path.with_suffix(".json")
    meta = {
        "columns": names,
        "scaling": None if dataset.scaling is None else [
            {"min": float(lo), "max": float(hi)} for lo, hi in dataset.scaling
        ],
        "seed": seed,
        "source": source,
        "rows": len(dataset),
    }
    sidecar.write_text(json.dumps(meta, indent=2) + "\n")
    return path, sidecar
