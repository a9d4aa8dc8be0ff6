"""Stratified fold planning: exact splits, partitioning, determinism."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskmeans.cv import FoldPlan, stratified_kfold


def fold_class_counts(plan: FoldPlan, labels: np.ndarray):
    return [
        (int(np.sum(labels[f] == 1)), int(np.sum(labels[f] == 0)))
        for f in plan.test_indices
    ]


def test_700_300_split_is_exact():
    labels = np.array([0] * 700 + [1] * 300)
    plan = stratified_kfold(labels, 5, seed=42)
    for pos, neg in fold_class_counts(plan, labels):
        assert (pos, neg) == (60, 140)


def test_ten_samples_five_folds():
    labels = np.array([0, 1] * 5)
    plan = stratified_kfold(labels, 5, seed=0)
    for pos, neg in fold_class_counts(plan, labels):
        assert (pos, neg) == (1, 1)


def test_307_383_split_within_one():
    labels = np.array([1] * 307 + [0] * 383)
    plan = stratified_kfold(labels, 5, seed=7)
    for pos, neg in fold_class_counts(plan, labels):
        assert pos in (61, 62)
        assert neg in (76, 77)


def test_folds_partition_all_indices():
    labels = np.random.default_rng(1).integers(0, 2, size=103)
    plan = stratified_kfold(labels, 4, seed=3)
    combined = np.concatenate(plan.test_indices)
    assert sorted(combined) == list(range(103))


def test_test_folds_sorted_and_train_is_complement():
    labels = np.array([0, 1] * 20)
    plan = stratified_kfold(labels, 4, seed=5)
    for i, fold in enumerate(plan.test_indices):
        assert (np.diff(fold) > 0).all()
        train = plan.train_indices(i)
        assert len(set(train) & set(fold)) == 0
        assert len(train) + len(fold) == 40


def test_deterministic_given_seed():
    labels = np.random.default_rng(2).integers(0, 2, size=60)
    a = stratified_kfold(labels, 3, seed=11)
    b = stratified_kfold(labels, 3, seed=11)
    c = stratified_kfold(labels, 3, seed=12)
    assert all((x == y).all() for x, y in zip(a.test_indices, b.test_indices))
    assert any((x.shape != y.shape) or (x != y).any()
               for x, y in zip(a.test_indices, c.test_indices))


def test_class_smaller_than_k_rejected():
    labels = np.array([0] * 20 + [1] * 3)
    with pytest.raises(ValueError, match="fewer than k"):
        stratified_kfold(labels, 5, seed=0)


def test_k_below_two_rejected():
    with pytest.raises(ValueError):
        stratified_kfold(np.array([0, 1, 0, 1]), 1, seed=0)


@given(
    n_pos=st.integers(min_value=3, max_value=60),
    n_neg=st.integers(min_value=3, max_value=60),
    seed=st.integers(min_value=0, max_value=1000),
)
@settings(deadline=None, max_examples=50)
def test_stratification_within_one_per_class(n_pos, n_neg, seed):
    k = 3
    labels = np.array([1] * n_pos + [0] * n_neg)
    rng = np.random.default_rng(seed)
    labels = labels[rng.permutation(labels.size)]
    plan = stratified_kfold(labels, k, seed=seed)
    counts = fold_class_counts(plan, labels)
    for pos, neg in counts:
        assert abs(pos - n_pos / k) <= 1
        assert abs(neg - n_neg / k) <= 1
    combined = np.concatenate(plan.test_indices)
    assert sorted(combined) == list(range(labels.size))
