"""Cosine geometry: similarities, neighborhoods and rank tables.

All neighbor orderings are by descending cosine similarity with ties broken
by ascending token id, so every query is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .embedding_io import EmbeddingModel

ModelLike = Union[EmbeddingModel, np.ndarray]


@dataclass(frozen=True)
class Neighborhood:
    center: int
    epsilon: float
    members: tuple[tuple[int, float], ...]

    @property
    def ids(self) -> list[int]:
        return [i for i, _ in self.members]

    def __len__(self) -> int:
        return len(self.members)


def _matrix(model: ModelLike) -> np.ndarray:
    if isinstance(model, EmbeddingModel):
        return model.vectors
    P = np.asarray(model, dtype=float)
    if P.ndim != 2:
        raise ValueError("expected a 2-D point matrix")
    return P


def cosine_similarity(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ValueError("cosine similarity is undefined for a zero vector")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def row_normalize(P: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(P, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ValueError("zero row; cannot normalize")
    return P / norms


def unit_normalize(model: EmbeddingModel) -> EmbeddingModel:
    return EmbeddingModel(model.vocab, row_normalize(model.vectors))


def similarity_matrix(model: ModelLike) -> np.ndarray:
    """Full ``n x n`` cosine similarity matrix."""
    U = row_normalize(_matrix(model))
    return np.clip(U @ U.T, -1.0, 1.0)


def similarities_to(model: ModelLike, center: int) -> np.ndarray:
    P = _matrix(model)
    U = row_normalize(P)
    return np.clip(U @ U[center], -1.0, 1.0)


def _check_center(P: np.ndarray, center: int) -> None:
    if not (isinstance(center, (int, np.integer)) and 0 <= center < P.shape[0]):
        raise IndexError(f"unknown center id {center!r}")


def _ordered(sims: np.ndarray, center: int) -> np.ndarray:
    """Indices sorted by descending similarity, ties by id, center removed."""
    ids = np.arange(sims.shape[0])
    order = np.lexsort((ids, -sims))
    return order[order != center]


def epsilon_neighborhood(model: ModelLike, center: int, epsilon: float) -> Neighborhood:
    """All words whose cosine distance to ``center`` is strictly below ``epsilon``."""
    P = _matrix(model)
    _check_center(P, center)
    if not 0 < epsilon <= 2:
        raise ValueError("epsilon must lie in (0, 2]")
    sims = similarities_to(P, center)
    order = _ordered(sims, center)
    keep = order[1.0 - sims[order] < epsilon]
    return Neighborhood(
        int(center), float(epsilon), tuple((int(j), float(sims[j])) for j in keep)
    )


def k_nearest(model: ModelLike, center: int, k: int) -> list[tuple[int, float]]:
    P = _matrix(model)
    _check_center(P, center)
    n = P.shape[0]
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in [1, {n - 1}], got {k}")
    sims = similarities_to(P, center)
    order = _ordered(sims, center)[:k]
    return [(int(j), float(sims[j])) for j in order]


def rank_table(model: ModelLike) -> np.ndarray:
    """``ranks[i, j]`` = 1-based position of ``j`` in the neighbor order of ``i``.

    The diagonal is 0. Accepts a model or a raw point matrix (e.g. embedded
    coordinates).
    """
    P = _matrix(model)
    n = P.shape[0]
    if n < 2:
        raise ValueError("rank table needs at least 2 points")
    key = -similarity_matrix(P)
    np.fill_diagonal(key, -np.inf)
    ids = np.broadcast_to(np.arange(n), (n, n))
    order = np.lexsort((ids, key), axis=-1)
    ranks = np.empty((n, n), dtype=np.int64)
    np.put_along_axis(ranks, order, np.broadcast_to(np.arange(n), (n, n)), axis=1)
    return ranks
