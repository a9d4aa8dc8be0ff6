"""Lloyd's K-means with k-means++ seeding, silhouette K selection, and a
cluster-posterior classifier.

Clustering alone yields no class predictions, so the classifier layer is an
explicit construction documented here rather than hidden plumbing:

* each cluster gets a Laplace-smoothed positive-class posterior
  ``(positives + 1) / (members + 2)`` from the training assignment;
* a query point scores ``sum_j w_j(x) * posterior_j`` where the weights are a
  softmax over ``-d_j^2 / (2 sigma^2)`` with ``d_j`` the distance to centroid
  ``j`` and ``sigma`` the mean train-point-to-centroid distance.

Scores are therefore continuous in [0, 1], which is what ROC/AUC and the
Brier score need; hard labels come from thresholding at 0.5 by default.

Determinism contracts: ties in assignment break to the lowest cluster index,
restart seeds derive from the model seed, and all means are reduced in row
order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .data_ingest import Dataset
from .seeding import derive_seed

INIT_KMEANSPP = "kmeanspp"
INIT_UNIFORM = "uniform"


@dataclass(frozen=True)
class KMeansParams:
    k: int
    max_iters: int = 300
    tol: float = 1e-6
    restarts: int = 10
    seed: int = 0
    init: str = INIT_KMEANSPP

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be >= 0")
        if self.init not in (INIT_KMEANSPP, INIT_UNIFORM):
            raise ValueError(f"unknown init {self.init!r}")


@dataclass(frozen=True)
class KMeansModel:
    """Fitted centroids plus the fit diagnostics needed to audit the run."""

    centroids: np.ndarray
    wcss: float
    iterations_run: int
    converged: bool
    wcss_trace: tuple = field(default=())

    def __post_init__(self):
        c = np.asarray(self.centroids, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "centroids", c)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    @property
    def d(self) -> int:
        return self.centroids.shape[1]


def _sq_dists(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance matrix, points x centers."""
    return ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def kmeanspp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """D^2-weighted center selection: each next center is drawn with probability
    proportional to its squared distance from the nearest existing center."""
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    centers = np.empty((k, points.shape[1]), dtype=float)
    centers[0] = points[rng.integers(n)]
    for j in range(1, k):
        d2 = _sq_dists(points, centers[:j]).min(axis=1)
        total = d2.sum()
        if total > 0:
            centers[j] = points[rng.choice(n, p=d2 / total)]
        else:
            # all rows coincide with existing centers (duplicate-heavy input)
            centers[j] = points[rng.integers(n)]
    return centers


def uniform_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Plain uniform draw of k distinct rows as initial centers."""
    points = np.asarray(points, dtype=float)
    if k > points.shape[0]:
        raise ValueError(f"k={k} exceeds n={points.shape[0]}")
    idx = rng.choice(points.shape[0], size=k, replace=False)
    return points[idx].astype(float)


def _lloyd_single(points: np.ndarray, params: KMeansParams, seed: int) -> KMeansModel:
    rng = np.random.default_rng(seed)
    init = kmeanspp_init if params.init == INIT_KMEANSPP else uniform_init
    centers = init(points, params.k, rng)

    trace: list[float] = []
    iterations = 0
    converged = False
    for _ in range(params.max_iters):
        d2 = _sq_dists(points, centers)
        labels = np.argmin(d2, axis=1)  # ties -> lowest index
        trace.append(float(d2[np.arange(points.shape[0]), labels].sum()))
        iterations += 1

        new_centers = np.empty_like(centers)
        for j in range(params.k):
            members = labels == j
            if members.any():
                new_centers[j] = points[members].mean(axis=0)
            else:
                # empty-cluster repair: reseed at the point farthest from the
                # stale centroid; keeps k constant and is deterministic
                new_centers[j] = points[np.argmax(d2[:, j])]

        shift = np.max(
            np.linalg.norm(new_centers - centers, axis=1)
            / (1.0 + np.linalg.norm(centers, axis=1))
        )
        centers = new_centers
        if shift < params.tol:
            converged = True
            break

    d2 = _sq_dists(points, centers)
    labels = np.argmin(d2, axis=1)
    wcss = float(d2[np.arange(points.shape[0]), labels].sum())
    trace.append(wcss)
    return KMeansModel(
        centroids=centers,
        wcss=wcss,
        iterations_run=iterations,
        converged=converged,
        wcss_trace=tuple(trace),
    )


def lloyd_fit(points: np.ndarray, params: KMeansParams) -> KMeansModel:
    """Run Lloyd's algorithm ``params.restarts`` times and keep the lowest-WCSS fit.

    Restart r uses the derived seed ``(params.seed, "restart:r")``, so single
    restarts can be reproduced in isolation.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError("points must be a 2-D matrix")
    if not np.all(np.isfinite(points)):
        raise ValueError("non-finite input")
    if points.shape[0] < params.k:
        raise ValueError(f"n={points.shape[0]} < k={params.k}")
    best: KMeansModel | None = None
    for r in range(max(1, params.restarts)):
        model = _lloyd_single(points, params, derive_seed(params.seed, f"restart:{r}"))
        if best is None or model.wcss < best.wcss:
            best = model
    return best


def assign(model: KMeansModel, x: np.ndarray) -> int:
    """Index of the nearest centroid; exact ties go to the lowest index."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.d,):
        raise ValueError(f"expected a vector of length {model.d}, got shape {x.shape}")
    return int(np.argmin(((model.centroids - x) ** 2).sum(axis=1)))


def assign_many(model: KMeansModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.argmin(_sq_dists(X, model.centroids), axis=1)


def silhouette_score(points: np.ndarray, assignment: np.ndarray) -> float:
    """Mean of (b - a) / max(a, b) over points.

    a is the mean distance to the point's own cluster (excluding itself); b is
    the smallest mean distance to any other cluster. Singleton-cluster points
    contribute 0.
    """
    points = np.asarray(points, dtype=float)
    assignment = np.asarray(assignment)
    n = points.shape[0]
    if n < 3:
        raise ValueError("silhouette needs at least 3 points")
    clusters = np.unique(assignment)
    if clusters.size < 2:
        raise ValueError("silhouette undefined for a single cluster")

    sizes = {int(c): int(np.sum(assignment == c)) for c in clusters}
    scores = np.zeros(n)
    chunk = 512
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        block = np.sqrt(_sq_dists(points[start:stop], points))  # (chunk, n)
        for i_local, i in enumerate(range(start, stop)):
            own = int(assignment[i])
            if sizes[own] == 1:
                continue  # singleton contributes 0
            row = block[i_local]
            a = row[assignment == own].sum() / (sizes[own] - 1)
            b = min(
                row[assignment == c].mean() for c in clusters if c != own
            )
            denom = max(a, b)
            if denom > 0:
                scores[i] = (b - a) / denom
    return float(scores.mean())


def choose_k(points: np.ndarray, k_range, params: KMeansParams) -> tuple[int, list[tuple[int, float]]]:
    """Fit every k in the inclusive range and pick the silhouette argmax.

    Ties break to the smallest k. Returns (chosen k, per-k silhouette table).
    """
    ks = list(k_range)
    if not ks:
        raise ValueError("empty k range")
    n = np.asarray(points).shape[0]
    for k in ks:
        if k < 2 or k > n - 1:
            raise ValueError(f"k={k} outside the valid range [2, {n - 1}]")
    table: list[tuple[int, float]] = []
    best_k, best_score = None, -np.inf
    for k in sorted(ks):
        model = lloyd_fit(points, KMeansParams(
            k=k, max_iters=params.max_iters, tol=params.tol,
            restarts=params.restarts, seed=params.seed, init=params.init,
        ))
        score = silhouette_score(points, assign_many(model, points))
        table.append((k, score))
        if score > best_score:
            best_k, best_score = k, score
    return best_k, table


@dataclass(frozen=True)
class ClusterClassifier:
    """K-means model plus per-cluster class posteriors and the score bandwidth."""

    model: KMeansModel
    posteriors: np.ndarray
    bandwidth: float
    threshold: float = 0.5

    def __post_init__(self):
        p = np.asarray(self.posteriors, dtype=float)
        if p.shape != (self.model.k,):
            raise ValueError("one posterior per cluster required")
        if np.any(p < 0) or np.any(p > 1):
            raise ValueError("posteriors must lie in [0, 1]")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        p.setflags(write=False)
        object.__setattr__(self, "posteriors", p)


def fit_classifier(train: Dataset, params: KMeansParams) -> ClusterClassifier:
    """Cluster the training features, then attach smoothed class posteriors.

    Cluster j's posterior is (positives_j + 1) / (members_j + 2); the score
    bandwidth is the mean distance of training points to their centroids (1.0
    if that collapses to zero).
    """
    X = np.asarray(train.features, dtype=float)
    y = np.asarray(train.labels)
    if np.unique(y).size < 2:
        raise ValueError("training set must contain both classes")
    model = lloyd_fit(X, params)
    labels = assign_many(model, X)
    posteriors = np.empty(model.k)
    for j in range(model.k):
        members = labels == j
        posteriors[j] = (int(y[members].sum()) + 1) / (int(members.sum()) + 2)
    dists = np.sqrt(((X - model.centroids[labels]) ** 2).sum(axis=1))
    sigma = float(dists.mean())
    return ClusterClassifier(model=model, posteriors=posteriors,
                             bandwidth=sigma if sigma > 0 else 1.0)


def predict_score(clf: ClusterClassifier, x: np.ndarray) -> float:
    """Posterior-weighted soft score in [0, 1] for one point."""
    x = np.asarray(x, dtype=float)
    if x.shape != (clf.model.d,):
        raise ValueError(f"expected a vector of length {clf.model.d}, got shape {x.shape}")
    return float(predict_scores(clf, x[None, :])[0])


def predict_scores(clf: ClusterClassifier, X: np.ndarray) -> np.ndarray:
    """Vectorized :func:`predict_score`: softmax cluster weights times posteriors."""
    X = np.asarray(X, dtype=float)
    d2 = _sq_dists(X, clf.model.centroids)
    logits = -d2 / (2.0 * clf.bandwidth**2)
    logits -= logits.max(axis=1, keepdims=True)
    w = np.exp(logits)
    w /= w.sum(axis=1, keepdims=True)
    return w @ clf.posteriors


def predict_labels(clf: ClusterClassifier, X: np.ndarray) -> np.ndarray:
    """Hard 0/1 labels: score >= threshold."""
    return (predict_scores(clf, X) >= clf.threshold).astype(int)


def classifier_to_json(clf: ClusterClassifier, seed: int | None = None,
                       preprocess_fingerprint: str = "") -> str:
    """Serialize a fitted classifier; floats keep full precision and round-trip."""
    payload = {
        "k": clf.model.k,
        "d": clf.model.d,
        "centroids": [[float(v) for v in row] for row in clf.model.centroids],
        "posteriors": [float(v) for v in clf.posteriors],
        "bandwidth": clf.bandwidth,
        "threshold": clf.threshold,
        "wcss": clf.model.wcss,
        "iterations_run": clf.model.iterations_run,
        "converged": clf.model.converged,
        "seed": seed,
        "preprocess_fingerprint": preprocess_fingerprint,
    }
    return json.dumps(payload, indent=2)


def classifier_from_json(text: str) -> ClusterClassifier:
    raw = json.loads(text)
    model = KMeansModel(
        centroids=np.array(raw["centroids"], dtype=float),
        wcss=raw["wcss"],
        iterations_run=raw["iterations_run"],
        converged=raw["converged"],
    )
    return ClusterClassifier(
        model=model,
        posteriors=np.array(raw["posteriors"], dtype=float),
        bandwidth=raw["bandwidth"],
        threshold=raw["threshold"],
    )
