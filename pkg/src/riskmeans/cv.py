"""Stratified k-fold planning.

Folds are index plans, not data copies: downstream code slices the dataset so
that preprocessing statistics are always refit on the train side only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FoldPlan:
    """Immutable record of one k-fold split over n indices."""

    k: int
    test_indices: tuple
    seed: int

    def __post_init__(self):
        folds = tuple(np.asarray(f, dtype=int) for f in self.test_indices)
        for f in folds:
            f.setflags(write=False)
        object.__setattr__(self, "test_indices", folds)

    @property
    def n(self) -> int:
        return sum(f.size for f in self.test_indices)

    def train_indices(self, fold: int) -> np.ndarray:
        """All indices not in the given test fold, ascending."""
        test = set(self.test_indices[fold].tolist())
        out = np.array([i for i in range(self.n) if i not in test], dtype=int)
        out.setflags(write=False)
        return out


def stratified_kfold(labels: np.ndarray, k: int, seed: int) -> FoldPlan:
    """Split indices into k folds preserving the class ratio.

    Within each class (classes processed in sorted order) the indices are
    shuffled with the seeded generator and dealt round-robin: the i-th
    shuffled index of the class goes to fold i mod k. Per-fold class counts
    therefore differ by at most one, and 700/300 with k=5 gives exactly
    140/60 in every fold. Each test fold is returned sorted ascending.
    """
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ValueError("labels must be a 1-D array")
    if k < 2:
        raise ValueError("k must be >= 2")
    rng = np.random.default_rng(seed)
    buckets: list[list[int]] = [[] for _ in range(k)]
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        if idx.size < k:
            raise ValueError(
                f"class {cls!r} has {idx.size} members, fewer than k={k} folds"
            )
        idx = idx[rng.permutation(idx.size)]
        for i, j in enumerate(idx):
            buckets[i % k].append(int(j))
    folds = tuple(np.array(sorted(b), dtype=int) for b in buckets)
    return FoldPlan(k=k, test_indices=folds, seed=seed)
