"""Shared fixtures: synthetic datasets and small file helpers."""

from __future__ import annotations

import numpy as np
import pytest

from riskmeans.data_ingest import ColumnSpec, Dataset


def make_blobs(n_per: int, centers, spread: float = 0.5, seed: int = 0) -> np.ndarray:
    """Stack one isotropic Gaussian blob per center row."""
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=float)
    return np.concatenate([
        c + spread * rng.standard_normal((n_per, centers.shape[1]))
        for c in centers
    ])


def make_labeled_blobs(n_per: int, sep: float = 6.0, d: int = 2,
                       spread: float = 0.6, seed: int = 0):
    """Two blobs, one per class: features plus 0/1 labels."""
    c0 = np.zeros(d)
    c1 = np.full(d, sep)
    X = make_blobs(n_per, [c0, c1], spread=spread, seed=seed)
    y = np.array([0] * n_per + [1] * n_per)
    return X, y


def numeric_dataset(X: np.ndarray, y: np.ndarray, name: str = "synthetic") -> Dataset:
    schema = [ColumnSpec(name=f"f{j}", kind="numeric") for j in range(X.shape[1])]
    return Dataset(features=np.asarray(X, dtype=float),
                   labels=np.asarray(y, dtype=int), schema=schema, name=name)


@pytest.fixture
def blob_dataset() -> Dataset:
    X, y = make_labeled_blobs(40, seed=3)
    return numeric_dataset(X, y)


def mixed_raw_dataset(n: int = 120, seed: int = 0, missing_rate: float = 0.1) -> Dataset:
    """Object-dtype dataset with numeric and categorical columns plus gaps,
    mimicking a freshly loaded file before preprocessing."""
    rng = np.random.default_rng(seed)
    y = (rng.random(n) < 0.4).astype(int)
    num0 = y * 2.0 + rng.normal(0, 1, n)
    num1 = rng.normal(5, 2, n)
    cats = np.where(rng.random(n) < 0.5, "low", np.where(y == 1, "high", "mid"))
    feat = np.empty((n, 3), dtype=object)
    for i in range(n):
        feat[i, 0] = np.nan if rng.random() < missing_rate else float(num0[i])
        feat[i, 1] = float(num1[i])
        feat[i, 2] = None if rng.random() < missing_rate else str(cats[i])
    schema = [
        ColumnSpec(name="amount", kind="numeric"),
        ColumnSpec(name="age", kind="numeric"),
        ColumnSpec(name="grade", kind="categorical"),
    ]
    return Dataset(features=feat, labels=y, schema=schema, name="mixed")


@pytest.fixture
def raw_dataset() -> Dataset:
    return mixed_raw_dataset()


def write_toy_files(tmp_path, n: int = 150, seed: int = 5):
    """Write a small csv + schema + config trio; returns their paths."""
    rng = np.random.default_rng(seed)
    y = (rng.random(n) < 0.4).astype(int)
    x0 = y * 1.8 + rng.normal(0, 1, n)
    x1 = -y * 1.5 + rng.normal(0, 1, n)
    grade = np.where(rng.random(n) < 0.6, "p", "q")
    data = tmp_path / "toy.csv"
    with open(data, "w", encoding="utf-8") as fh:
        fh.write("x0,x1,grade,outcome\n")
        for i in range(n):
            fh.write(f"{x0[i]:.6f},{x1[i]:.6f},{grade[i]},"
                     f"{'bad' if y[i] else 'good'}\n")
    schema = tmp_path / "toy.schema"
    schema.write_text(
        "column x0 numeric\n"
        "column x1 numeric\n"
        "column grade categorical\n"
        "column outcome categorical\n"
        "label outcome positive=bad\n",
        encoding="utf-8",
    )
    config = tmp_path / "toy.ini"
    config.write_text(
        "[data]\n"
        f"path = {data}\n"
        f"schema = {schema}\n"
        "name = toy\n"
        "\n[kmeans]\nk = auto\nk_max = 5\nrestarts = 4\n"
        "\n[cv]\nfolds = 5\n"
        f"\n[output]\ndir = {tmp_path / 'out'}\n",
        encoding="utf-8",
    )
    return data, schema, config
