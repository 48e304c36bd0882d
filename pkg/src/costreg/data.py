"""Dataset container, CSV ingestion, standardization and CV folds."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (BadFoldCount, EmptyFile, MissingLabelColumn,
                     NonNumericCell, RaggedRow, TooFewRows)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """T observations of p features plus one label column.

    Arrays are copied and made read-only on construction.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple = ()

    def __post_init__(self):
        X = _frozen(self.features)
        if X.ndim == 1:
            X = _frozen(X.reshape(-1, 1))
        y = _frozen(self.labels).ravel()
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError(f"features must be a non-empty T x p matrix, got shape {X.shape}")
        if y.shape[0] != X.shape[0]:
            raise ValueError(f"{y.shape[0]} labels for {X.shape[0]} rows")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("dataset contains non-finite values")
        names = tuple(self.feature_names) or tuple(f"x{j + 1}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise ValueError("feature_names length does not match feature count")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def T(self):
        return self.features.shape[0]

    @property
    def p(self):
        return self.features.shape[1]

    def subset(self, rows):
        return Dataset(self.features[rows], self.labels[rows], self.feature_names)


@dataclass(frozen=True)
class ScalingInfo:
    mean: np.ndarray
    scale: np.ndarray
    constant_columns: tuple = ()


@dataclass(frozen=True)
class FoldAssignment:
    fold_of_row: np.ndarray
    k: int
    seed: int

    def train_rows(self, fold):
        return np.flatnonzero(self.fold_of_row != fold)

    def test_rows(self, fold):
        return np.flatnonzero(self.fold_of_row == fold)

    def sizes(self):
        return np.bincount(self.fold_of_row, minlength=self.k)


def _parse_cell(text, row, col):
    try:
        value = float(text)
    except ValueError:
        raise NonNumericCell(row, col, text) from None
    # float() also accepts "nan"/"inf" and digit separators; neither is data
    if not math.isfinite(value) or "_" in text:
        raise NonNumericCell(row, col, text)
    return value


def load_csv(path, label_column) -> Dataset:
    """Read a headered, comma-separated numeric file.

    The label column may sit anywhere in the header; every other column
    becomes a feature in file order.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise EmptyFile(f"{path}: no header")
    header = [h.strip() for h in rows[0]]
    if label_column not in header:
        raise MissingLabelColumn(label_column, header)
    body = rows[1:]
    if not body:
        raise EmptyFile(f"{path}: header only, no data rows")
    label_idx = header.index(label_column)
    values = np.empty((len(body), len(header)))
    for i, r in enumerate(body, start=1):
        if len(r) != len(header):
            raise RaggedRow(i, len(r), len(header))
        for j, cell in enumerate(r):
            values[i - 1, j] = _parse_cell(cell.strip(), i, j)
    feature_idx = [j for j in range(len(header)) if j != label_idx]
    if not feature_idx:
        raise EmptyFile(f"{path}: no feature columns besides {label_column!r}")
    return Dataset(values[:, feature_idx], values[:, label_idx],
                   tuple(header[j] for j in feature_idx))


def standardize(d: Dataset):
    """Center and scale each feature with the sample (n-1) standard deviation.

    Constant columns are zeroed and reported in ``constant_columns``; their
    scale is recorded as 1 so that :func:`unstandardize` restores them.
    """
    if d.T < 2:
        raise TooFewRows(f"standardize needs at least 2 rows, got {d.T}")
    X = d.features
    mean = X.mean(axis=0)
    scale = X.std(axis=0, ddof=1)
    # zero spread also catches variance underflow on near-identical values
    constant = np.flatnonzero(np.all(X == X[0], axis=0) | ~(scale > 0))
    scale[constant] = 1.0
    Z = (X - mean) / scale
    Z[:, constant] = 0.0
    info = ScalingInfo(_frozen(mean), _frozen(scale), tuple(int(j) for j in constant))
    return Dataset(Z, d.labels, d.feature_names), info


def unstandardize(features, info: ScalingInfo):
    return np.asarray(features, dtype=float) * info.scale + info.mean


def split_folds(d: Dataset, k: int, seed: int) -> FoldAssignment:
    """Shuffle rows with ``seed`` and deal them round-robin into k folds."""
    T = d.T if isinstance(d, Dataset) else int(d)
    if not 2 <= k <= T:
        raise BadFoldCount(f"need 2 <= k <= T, got k={k}, T={T}")
    order = np.random.default_rng(seed).permutation(T)
    fold = np.empty(T, dtype=int)
    fold[order] = np.arange(T) % k
    fold.setflags(write=False)
    return FoldAssignment(fold, k, seed)
