"""1-D k-means over task scores, silhouette-based choice of k, global/local split."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Cluster:
    members: tuple[tuple[int, int], ...]  # (task, score), descending score then ascending task

    def __post_init__(self):
        if not self.members:
            raise ValueError("a cluster needs at least one member")

    @property
    def tasks(self) -> list[int]:
        return [t for t, _ in self.members]

    @property
    def scores(self) -> list[int]:
        return [s for _, s in self.members]

    @property
    def mean_score(self) -> float:
        return sum(self.scores) / len(self.members)

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class ClusterSet:
    clusters: tuple[Cluster, ...]
    silhouette: float | None  # None when a single cluster was formed without comparison

    @property
    def k(self) -> int:
        return len(self.clusters)


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray     # cluster index per point, clusters numbered by ascending centroid
    centroids: np.ndarray  # ascending
    sse: float


def _kmeanspp(x: np.ndarray, k: int, restarts: int, rng: np.random.Generator) -> np.ndarray:
    n = len(x)
    centers = np.empty((restarts, k))
    centers[:, 0] = x[rng.integers(n, size=restarts)]
    d2 = (x[None, :] - centers[:, :1]) ** 2
    for j in range(1, k):
        total = d2.sum(axis=1, keepdims=True)
        # identical remaining points: fall back to uniform choice
        probs = np.where(total > 0, d2 / np.where(total > 0, total, 1.0), 1.0 / n)
        cdf = np.cumsum(probs, axis=1)
        u = rng.random((restarts, 1)) * cdf[:, -1:]
        idx = np.minimum((cdf <= u).sum(axis=1), n - 1)
        centers[:, j] = x[idx]
        d2 = np.minimum(d2, (x[None, :] - centers[:, j:j + 1]) ** 2)
    return centers


def kmeans_1d(values, k: int, rng: np.random.Generator, restarts: int = 16,
              max_iter: int = 100) -> KMeansResult:
    """Lloyd's algorithm with k-means++ seeding; best of ``restarts`` by SSE.

    All restarts run side by side.  Ties in assignment go to the lower-valued
    centroid.  ``k`` may not exceed the number of distinct values.
    """
    x = np.asarray(values, dtype=float)
    n = len(x)
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of points ({n})")
    if k > len(np.unique(x)):
        raise ValueError(f"k={k} exceeds the number of distinct values")
    if restarts < 1:
        raise ValueError("need at least one restart")

    centers = np.sort(_kmeanspp(x, k, restarts, rng), axis=1)
    labels = np.argmin(np.abs(x[None, :, None] - centers[:, None, :]), axis=2)
    for _ in range(max_iter):
        onehot = labels[:, :, None] == np.arange(k)[None, None, :]
        counts = onehot.sum(axis=1)
        sums = (onehot * x[None, :, None]).sum(axis=1)
        centers = np.where(counts > 0, sums / np.maximum(counts, 1), centers)
        new = np.argmin(np.abs(x[None, :, None] - centers[:, None, :]), axis=2)
        if np.array_equal(new, labels):
            break
        labels = new

    sse = ((x[None, :] - np.take_along_axis(centers, labels, axis=1)) ** 2).sum(axis=1)
    best = int(np.argmin(sse))
    lab, cen = labels[best], centers[best]
    # renumber by ascending centroid, dropping clusters left empty
    used = np.unique(lab)
    order = used[np.argsort(cen[used], kind="stable")]
    remap = np.empty(k, dtype=int)
    remap[order] = np.arange(len(order))
    return KMeansResult(labels=remap[lab], centroids=cen[order], sse=float(sse[best]))


def silhouette(values, labels) -> float:
    """Mean silhouette coefficient with absolute-difference distance.

    Points alone in their cluster score 0, as do points with a == b == 0.
    """
    x = np.asarray(values, dtype=float)
    labels = np.asarray(labels)
    if len(labels) != len(x):
        raise ValueError("labels must cover every point")
    ids = np.unique(labels)
    if len(ids) < 2:
        raise ValueError("silhouette needs at least two clusters")
    dist = np.abs(x[:, None] - x[None, :])
    member = labels[None, :] == ids[:, None]          # (clusters, points)
    sizes = member.sum(axis=1)
    sums = dist @ member.T.astype(float)              # (points, clusters)
    own = np.searchsorted(ids, labels)
    own_size = sizes[own]
    a = np.where(own_size > 1, sums[np.arange(len(x)), own] / np.maximum(own_size - 1, 1), 0.0)
    mean_other = sums / sizes[None, :]
    mean_other[np.arange(len(x)), own] = np.inf
    b = mean_other.min(axis=1)
    denom = np.maximum(a, b)
    s = np.where((own_size > 1) & (denom > 0), (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
    return float(s.mean())


def _sorted_members(pairs) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(pairs, key=lambda p: (-p[1], p[0])))


def _build(pairs, labels, sil) -> ClusterSet:
    groups: dict[int, list] = {}
    for pair, lab in zip(pairs, labels):
        groups.setdefault(int(lab), []).append(pair)
    clusters = [Cluster(_sorted_members(g)) for g in groups.values()]
    clusters.sort(key=lambda c: (-c.mean_score, min(c.tasks)))
    return ClusterSet(tuple(clusters), sil)


def select_clusters(scores: dict[int, int], rng: np.random.Generator, k_min: int = 2,
                    k_max: int = 10, restarts: int = 16) -> ClusterSet:
    """Cluster task scores, choosing k in [k_min, k_max] by highest silhouette.

    Two or fewer tasks form one cluster.  Ties in silhouette go to the smaller
    k, and a best silhouette <= 0 collapses everything into one cluster.
    """
    if not scores:
        raise ValueError("cannot cluster an empty score report")
    pairs = sorted((int(t), int(s)) for t, s in scores.items())
    n = len(pairs)
    single = [0] * n
    if n <= 2:
        return _build(pairs, single, None)
    x = np.array([s for _, s in pairs], dtype=float)
    hi = min(k_max, n - 1, len(np.unique(x)))
    best_k, best_sil, best_labels = None, -math.inf, None
    for k in range(max(k_min, 2), hi + 1):
        res = kmeans_1d(x, k, rng, restarts=restarts)
        if res.centroids.size < 2:
            continue
        sil = silhouette(x, res.labels)
        if sil > best_sil:
            best_k, best_sil, best_labels = k, sil, res.labels
    if best_k is None or best_sil <= 0:
        return _build(pairs, single, None if best_k is None else best_sil)
    return _build(pairs, best_labels, best_sil)


def pick_global(cluster: Cluster) -> int:
    """Median member of the descending-ordered cluster, 1-based position ceil((n+1)/2)."""
    n = len(cluster.members)
    if n == 0:
        raise ValueError("empty cluster")
    return cluster.members[math.ceil((n + 1) / 2) - 1][0]


def local_tasks(cluster: Cluster, global_task: int) -> list[int]:
    tasks = cluster.tasks
    if global_task not in tasks:
        raise ValueError(f"task {global_task} is not a member of the cluster")
    return [t for t in tasks if t != global_task]
