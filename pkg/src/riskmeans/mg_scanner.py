"""Multi-granularity sliding-window feature expansion.

Each window size w turns an L-dimensional input into ((L - w) // s + 1)
overlapping slices; every slice is pushed through m fitted per-window
estimators, each emitting c class probabilities. Output dimension per window
size is therefore window_count * m * c, and outputs for different window
sizes stay separate (keyed by w) so downstream stages can choose how to
combine them.

Estimators are pluggable: anything with fit(windows, labels) and
transform(window) -> c probabilities works. The default is a small K-means
cluster-posterior classifier; a constant stub exists for exercising the
dimension contract without any fitting.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, replace

import numpy as np

from .data_ingest import ColumnSpec, Dataset, NUMERIC
from .kmeans_core import (
    ClusterClassifier,
    KMeansParams,
    fit_classifier,
    predict_scores,
)
from .seeding import derive_seed

PROB_TOL = 1e-9


@dataclass(frozen=True)
class ScanConfig:
    """Geometry of the scan: input length, window sizes, stride, estimator
    count per window size, and class count."""

    input_dim: int
    windows: tuple
    stride: int = 1
    estimators: int = 2
    classes: int = 2

    def __post_init__(self):
        object.__setattr__(self, "windows", tuple(int(w) for w in self.windows))
        if self.input_dim < 1:
            raise ValueError("input_dim must be >= 1")
        if not self.windows:
            raise ValueError("at least one window size required")
        for w in self.windows:
            if not 1 <= w <= self.input_dim:
                raise ValueError(f"window size {w} outside [1, {self.input_dim}]")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.estimators < 1 or self.classes < 2:
            raise ValueError("need >= 1 estimator and >= 2 classes")

    def output_dim(self, w: int) -> int:
        return window_count(self.input_dim, w, self.stride) * self.estimators * self.classes


def window_count(L: int, w: int, s: int) -> int:
    """Number of stride-s windows of width w over an L-vector: (L - w)//s + 1."""
    if w > L:
        raise ValueError(f"window {w} exceeds input length {L}")
    if w < 1 or s < 1:
        raise ValueError("window and stride must be >= 1")
    return (L - w) // s + 1


def scan(x: np.ndarray, w: int, s: int = 1) -> np.ndarray:
    """All contiguous slices x[i*s : i*s + w], stacked in order."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("scan expects a 1-D vector")
    count = window_count(x.shape[0], w, s)
    return np.stack([x[i * s:i * s + w] for i in range(count)])


class WindowEstimator(ABC):
    """Per-window probabilistic model: fit on window vectors, emit c class
    probabilities per window (summing to 1)."""

    @abstractmethod
    def fit(self, windows: np.ndarray, labels: np.ndarray) -> "WindowEstimator":
        ...

    @abstractmethod
    def transform(self, window: np.ndarray) -> np.ndarray:
        ...

    def transform_many(self, windows: np.ndarray) -> np.ndarray:
        return np.stack([self.transform(w) for w in np.asarray(windows, dtype=float)])


class ConstantProbEstimator(WindowEstimator):
    """Stub that ignores its input and always emits a fixed distribution.

    Exists so the output-dimension contract can be tested with no fitting.
    """

    def __init__(self, probs=(0.5, 0.5)):
        p = np.asarray(probs, dtype=float)
        if abs(p.sum() - 1.0) > PROB_TOL or np.any(p < 0):
            raise ValueError("probs must be a distribution")
        self.probs = p

    def fit(self, windows, labels):
        return self

    def transform(self, window):
        return self.probs.copy()

    def transform_many(self, windows):
        return np.tile(self.probs, (np.asarray(windows).shape[0], 1))


class KMeansWindowEstimator(WindowEstimator):
    """Cluster-posterior classifier over window vectors; emits (1 - s, s)
    where s is the continuous positive-class score."""

    def __init__(self, params: KMeansParams | None = None):
        self.params = params or KMeansParams(k=2, restarts=2, max_iters=100)
        self.classifier: ClusterClassifier | None = None

    def fit(self, windows, labels):
        windows = np.asarray(windows, dtype=float)
        schema = [ColumnSpec(name=f"x{j}", kind=NUMERIC) for j in range(windows.shape[1])]
        ds = Dataset(features=windows, labels=np.asarray(labels, dtype=int),
                     schema=schema, name="window-pool")
        self.classifier = fit_classifier(ds, self.params)
        return self

    def transform(self, window):
        return self.transform_many(np.asarray(window, dtype=float)[None, :])[0]

    def transform_many(self, windows):
        if self.classifier is None:
            raise RuntimeError("estimator not fitted")
        s = predict_scores(self.classifier, np.asarray(windows, dtype=float))
        return np.column_stack([1.0 - s, s])


def fit_window_estimators(train: Dataset, config: ScanConfig, seed: int = 0,
                          kmeans_params: KMeansParams | None = None) -> dict:
    """Fit config.estimators K-means window models per window size.

    For each w, every training row is sliced into its windows and the slices
    pooled (each inheriting the row label); the m estimators differ only in
    their derived seeds.
    """
    X = np.asarray(train.features, dtype=float)
    if X.shape[1] != config.input_dim:
        raise ValueError(
            f"dataset dimension {X.shape[1]} != configured input_dim {config.input_dim}"
        )
    if config.classes != 2:
        raise ValueError("the K-means window estimator is binary (classes=2)")
    base = kmeans_params or KMeansParams(k=2, restarts=2, max_iters=100)
    y = np.asarray(train.labels)
    fitted: dict[int, list[WindowEstimator]] = {}
    for w in config.windows:
        count = window_count(config.input_dim, w, config.stride)
        pool = np.concatenate([scan(row, w, config.stride) for row in X])
        pool_labels = np.repeat(y, count)
        fitted[w] = [
            KMeansWindowEstimator(
                replace(base, seed=derive_seed(seed, f"scan:w{w}:e{e}"))
            ).fit(pool, pool_labels)
            for e in range(config.estimators)
        ]
    return fitted


def _check_fitted(config: ScanConfig, fitted: dict) -> None:
    for w in config.windows:
        if w not in fitted or len(fitted[w]) != config.estimators:
            raise ValueError(f"missing fitted estimators for window size {w}")


def transform_vector(x: np.ndarray, config: ScanConfig, fitted: dict) -> dict:
    """Expand one L-vector into {w: concatenated probability features}.

    Layout per w: window index outer, estimator next, class innermost, so the
    flat index is win*m*c + est*c + cls.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (config.input_dim,):
        raise ValueError(f"expected a vector of length {config.input_dim}, got {x.shape}")
    _check_fitted(config, fitted)
    out: dict[int, np.ndarray] = {}
    for w in config.windows:
        windows = scan(x, w, config.stride)
        per_est = [est.transform_many(windows) for est in fitted[w]]  # m x (count, c)
        stacked = np.stack(per_est, axis=1)  # (count, m, c)
        if np.max(np.abs(stacked.sum(axis=2) - 1.0)) > PROB_TOL:
            raise ValueError("estimator probabilities do not sum to 1")
        vec = stacked.ravel()
        assert vec.shape[0] == config.output_dim(w)
        out[w] = vec
    return out


def transform_matrix(X: np.ndarray, config: ScanConfig, fitted: dict) -> dict:
    """Row-wise :func:`transform_vector`: {w: (n, window_count*m*c) matrix}."""
    X = np.asarray(X, dtype=float)
    out = {w: np.empty((X.shape[0], config.output_dim(w))) for w in config.windows}
    for i, row in enumerate(X):
        for w, vec in transform_vector(row, config, fitted).items():
            out[w][i] = vec
    return out


def feature_names(config: ScanConfig, w: int) -> list[str]:
    """Column names for one window size's output: w, window index, estimator, class."""
    count = window_count(config.input_dim, w, config.stride)
    return [
        f"w{w}:win{i}:e{e}:c{k}"
        for i in range(count)
        for e in range(config.estimators)
        for k in range(config.classes)
    ]


def dump_features(matrix: np.ndarray, config: ScanConfig, w: int, path) -> None:
    """Write one window size's transformed rows as comma-separated text."""
    names = feature_names(config, w)
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape[1] != len(names):
        raise ValueError(f"matrix has {matrix.shape[1]} columns, expected {len(names)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(names) + "\n")
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
