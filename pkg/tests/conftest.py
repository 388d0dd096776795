import numpy as np
import pytest

from insbank.core import CandidatePoint


def make_point(pid, embedding, quality=1.0, source=""):
    return CandidatePoint(
        id=pid, embedding=np.asarray(embedding, dtype=np.float64), quality=quality, source=source
    )


def cluster_pool(
    seed,
    n_clusters=3,
    per_cluster=4,
    dim=2,
    spread=0.05,
    separation=10.0,
    quality_by_density=False,
    cluster_sizes=None,
    prefix="p",
):
    """Well-separated Gaussian blobs. With quality_by_density, points in larger
    (denser) clusters get higher quality scores."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(scale=separation, size=(n_clusters, dim))
    sizes = cluster_sizes if cluster_sizes is not None else [per_cluster] * n_clusters
    points = []
    idx = 0
    for c, size in enumerate(sizes):
        for _ in range(size):
            emb = centers[c] + rng.normal(scale=spread, size=dim)
            if quality_by_density:
                quality = size + rng.normal(scale=0.3)
            else:
                quality = rng.uniform(1.0, 6.0)
            points.append(make_point(f"{prefix}{idx:05d}", emb, quality=quality))
            idx += 1
    return points


@pytest.fixture
def three_cluster_pool():
    return cluster_pool(seed=7, n_clusters=3, per_cluster=4, dim=2)
