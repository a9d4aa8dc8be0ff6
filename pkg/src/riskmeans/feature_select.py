"""Recursive feature elimination ranked by a self-contained logistic regression.

The logistic model doubles as the "lr" benchmark baseline, so it is trained
by deterministic full-batch gradient descent rather than anything stochastic:
zero-initialized weights, fixed learning rate, L2 penalty on weights only.
Rankings use |weight| on internally standardized columns so magnitudes are
comparable across features.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import cv as _cv
from .data_ingest import ColumnSpec, Dataset, NUMERIC
from .kmeans_core import KMeansParams, fit_classifier, predict_labels
from .seeding import derive_seed

PROB_FLOOR = 1e-12


def _sigmoid(z: np.ndarray) -> np.ndarray:
    """Overflow-safe logistic function (exponentiates negative magnitudes only)."""
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True)
class LogisticModel:
    """Weights and bias of a fitted logistic regression plus training meta."""

    weights: np.ndarray
    bias: float
    iterations: int
    final_loss: float
    loss_trace: tuple = field(default=(), repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if not (np.all(np.isfinite(w)) and math.isfinite(self.bias)):
            raise ValueError("non-finite parameters")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """P(y=1 | x), clipped away from exactly 0 and 1."""
        z = np.asarray(X, dtype=float) @ self.weights + self.bias
        return np.clip(_sigmoid(z), PROB_FLOOR, 1.0 - PROB_FLOOR)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)


def logistic_loss_and_grad(w: np.ndarray, b: float, X: np.ndarray,
                           y: np.ndarray, l2: float) -> tuple[float, np.ndarray, float]:
    """Mean log-loss plus (l2/2)·||w||², with its exact analytic gradient.

    The bias is unpenalized. Probabilities are clipped only inside the log,
    so the gradient stays the textbook (1/n)·Xᵀ(p−y) + l2·w form.
    """
    z = X @ w + b
    p = _sigmoid(z)
    pc = np.clip(p, PROB_FLOOR, 1.0 - PROB_FLOOR)
    n = X.shape[0]
    loss = float(-np.mean(y * np.log(pc) + (1 - y) * np.log(1 - pc))
                 + 0.5 * l2 * float(w @ w))
    resid = (p - y) / n
    return loss, X.T @ resid + l2 * w, float(resid.sum())


def fit_logistic(X: np.ndarray, y: np.ndarray, lr: float = 0.1,
                 epochs: int = 500, l2: float = 1e-4, seed: int = 0) -> LogisticModel:
    """Full-batch gradient descent from zero-initialized parameters.

    The seed is accepted for interface uniformity but unused: zero init plus
    full-batch updates make the fit deterministic on its own.
    """
    del seed
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError("X must be n x d with matching y")
    if np.unique(y).size < 2:
        raise ValueError("training labels contain a single class")
    if lr <= 0 or l2 < 0:
        raise ValueError("lr must be positive and l2 non-negative")
    w = np.zeros(X.shape[1])
    b = 0.0
    trace: list[float] = []
    for _ in range(epochs):
        loss, gw, gb = logistic_loss_and_grad(w, b, X, y, l2)
        trace.append(loss)
        w = w - lr * gw
        b = b - lr * gb
    final_loss = logistic_loss_and_grad(w, b, X, y, l2)[0]
    trace.append(final_loss)
    return LogisticModel(weights=w, bias=b, iterations=epochs,
                         final_loss=final_loss, loss_trace=tuple(trace))


@dataclass(frozen=True)
class RfeResult:
    """Surviving original column indices plus the per-round elimination log."""

    selected: tuple
    elimination_trace: tuple  # (round, dropped original index, ranking score)

    def __post_init__(self):
        sel = tuple(int(i) for i in self.selected)
        if len(set(sel)) != len(sel):
            raise ValueError("duplicate selected indices")
        object.__setattr__(self, "selected", sel)
        object.__setattr__(self, "elimination_trace", tuple(self.elimination_trace))


def _standardize_columns(X: np.ndarray) -> np.ndarray:
    """Population-std column standardization; constant columns become zeros."""
    mu = X.mean(axis=0)
    sigma = X.std(axis=0)
    out = np.zeros_like(X, dtype=float)
    nz = sigma != 0
    out[:, nz] = (X[:, nz] - mu[nz]) / sigma[nz]
    return out


def rfe(X: np.ndarray, y: np.ndarray, target_k: int, step: int = 1,
        lr: float = 0.1, epochs: int = 500, l2: float = 1e-4) -> RfeResult:
    """Drop the lowest-|weight| features one round at a time until target_k remain.

    Each round refits the logistic ranker on the standardized survivors. Score
    ties drop the highest original column index first. ``selected`` is sorted
    ascending by original index.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    d = X.shape[1]
    if not 1 <= target_k <= d:
        raise ValueError(f"target_k={target_k} outside [1, {d}]")
    if step < 1:
        raise ValueError("step must be >= 1")
    surviving = list(range(d))
    trace: list[tuple[int, int, float]] = []
    round_no = 0
    while len(surviving) > target_k:
        model = fit_logistic(_standardize_columns(X[:, surviving]), y,
                             lr=lr, epochs=epochs, l2=l2)
        ranks = np.abs(model.weights)
        n_drop = min(step, len(surviving) - target_k)
        # order by (score asc, original index desc) so ties shed the highest index
        order = sorted(range(len(surviving)),
                       key=lambda i: (ranks[i], -surviving[i]))
        dropped = sorted(order[:n_drop], reverse=True)  # pop from the back safely
        for i in dropped:
            trace.append((round_no, surviving[i], float(ranks[i])))
            surviving.pop(i)
        round_no += 1
    return RfeResult(selected=tuple(sorted(surviving)), elimination_trace=tuple(trace))


def default_candidates(d: int) -> list[int]:
    """Target-size grid used when no explicit count is configured."""
    raw = {d, math.ceil(3 * d / 4), math.ceil(d / 2), math.ceil(d / 4)}
    return sorted(k for k in raw if k >= 1)


def _as_dataset(X: np.ndarray, y: np.ndarray) -> Dataset:
    schema = [ColumnSpec(name=f"f{j}", kind=NUMERIC) for j in range(X.shape[1])]
    return Dataset(features=np.asarray(X, dtype=float), labels=np.asarray(y, dtype=int),
                   schema=schema, name="selection-probe")


def select_target_k(X: np.ndarray, y: np.ndarray, candidates, cv_folds: int,
                    seed: int = 0, kmeans_params: KMeansParams | None = None) -> int:
    """Pick the candidate feature count with the best K-means-classifier CV accuracy.

    For every candidate: run rfe to that size, then cross-validate a small
    fixed-k cluster classifier on the selected columns. Accuracy is pooled
    over folds (total correct / n) so ties are exact; ties break to the
    smaller candidate.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    candidates = list(candidates)
    if not candidates:
        raise ValueError("empty candidate list")
    d = X.shape[1]
    for c in candidates:
        if not 1 <= c <= d:
            raise ValueError(f"candidate {c} outside [1, {d}]")
    base = kmeans_params or KMeansParams(k=2, restarts=2, max_iters=100)
    plan = _cv.stratified_kfold(y, cv_folds, derive_seed(seed, "target_k:folds"))

    scored: list[tuple[int, int]] = []  # (candidate, pooled correct count)
    for cand in candidates:
        sel = list(rfe(X, y, target_k=cand).selected)
        params = replace(base, seed=derive_seed(seed, f"target_k:{cand}"))
        correct = 0
        for fold in range(plan.k):
            tr, te = plan.train_indices(fold), plan.test_indices[fold]
            clf = fit_classifier(_as_dataset(X[tr][:, sel], y[tr]), params)
            correct += int(np.sum(predict_labels(clf, X[te][:, sel]) == y[te]))
        scored.append((cand, correct))
    best = max(c for _, c in scored)
    return min(cand for cand, c in scored if c == best)
