"""Neighborhood-preservation metrics: trustworthiness, continuity, overlap."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .embedding_io import EmbeddingModel, subset_vocabulary
from .geometry import ModelLike, k_nearest, rank_table


def _check(high: np.ndarray, low: np.ndarray, k: int) -> int:
    high = np.asarray(high)
    low = np.asarray(low)
    if high.shape != low.shape or high.ndim != 2 or high.shape[0] != high.shape[1]:
        raise ValueError(f"rank tables differ in shape: {high.shape} vs {low.shape}")
    n = high.shape[0]
    if not (1 <= k and 2 * k < n):
        raise ValueError(f"k must satisfy 1 <= k < n/2 (n={n}), got {k}")
    return n


def _penalty(ranks_ref: np.ndarray, ranks_cmp: np.ndarray, k: int) -> int:
    # Points within the k nearest of i under ranks_cmp but not under ranks_ref,
    # penalized by how far down they sit in the ranks_ref ordering.
    intruders = (ranks_cmp >= 1) & (ranks_cmp <= k) & (ranks_ref > k)
    return int(np.sum(ranks_ref[intruders] - k, dtype=np.int64))


def _scale(n: int, k: int) -> int:
    return n * k * (2 * n - 3 * k - 1)


def trustworthiness(high: np.ndarray, low: np.ndarray, k: int) -> float:
    """Penalizes points that enter a low-space k-neighborhood from afar.

    ``high`` and ``low`` are rank tables (see :func:`geometry.rank_table`)
    over the same points. Requires ``k < n / 2``.
    """
    n = _check(high, low, k)
    return 1.0 - 2.0 * _penalty(np.asarray(high), np.asarray(low), k) / _scale(n, k)


def continuity(high: np.ndarray, low: np.ndarray, k: int) -> float:
    """Penalizes high-space k-neighbors lost in the low space.

    Equal to ``trustworthiness(low, high, k)``.
    """
    n = _check(high, low, k)
    return 1.0 - 2.0 * _penalty(np.asarray(low), np.asarray(high), k) / _scale(n, k)


def trustworthiness_continuity(
    high_points: ModelLike, low_points: ModelLike, k_values: Sequence[int]
) -> list[tuple[int, float, float]]:
    high = rank_table(high_points)
    low = rank_table(low_points)
    return [(k, trustworthiness(high, low, k), continuity(high, low, k)) for k in k_values]


def common_vocabulary(modelA: EmbeddingModel, modelB: EmbeddingModel) -> list[str]:
    return [t for t in modelA.vocab if t in modelB]


def neighborhood_overlap(
    modelA: EmbeddingModel, modelB: EmbeddingModel, words: Sequence[str], k: int
) -> list[tuple[str, float]]:
    """Fraction of shared k-nearest neighbors of each word across two models.

    Neighbors are searched within the common vocabulary only.
    """
    for w in words:
        if w not in modelA or w not in modelB:
            raise KeyError(f"token {w!r} absent from a model")
    common = common_vocabulary(modelA, modelB)
    limit = min(modelA.n, modelB.n, len(common))
    if not 1 <= k < limit:
        raise ValueError(f"k must lie in [1, {limit - 1}], got {k}")
    subA = subset_vocabulary(modelA, common)
    subB = subset_vocabulary(modelB, common)
    out = []
    for w in words:
        nA = {subA.vocab[j] for j, _ in k_nearest(subA, subA.id_of(w), k)}
        nB = {subB.vocab[j] for j, _ in k_nearest(subB, subB.id_of(w), k)}
        out.append((w, len(nA & nB) / k))
    return out


def sample_words(model: EmbeddingModel, strategy: str, count: int, seed: int = 0) -> list[str]:
    """Pick words to probe.

    ``by_rank`` takes the head of the vocabulary (word2vec files are
    conventionally frequency-sorted); ``uniform`` draws without replacement.
    """
    if not 0 <= count <= model.n:
        raise ValueError(f"count must lie in [0, {model.n}], got {count}")
    if strategy == "by_rank":
        return list(model.vocab[:count])
    if strategy == "uniform":
        rng = np.random.default_rng(seed)
        idx = rng.choice(model.n, size=count, replace=False)
        return [model.vocab[i] for i in idx]
    raise ValueError(f"unknown sampling strategy {strategy!r}")


@dataclass
class MetricsReport:
    per_k: list[tuple[int, float, float]]
    overlap: list[tuple[str, float]]

    def __post_init__(self):
        ks = [k for k, _, _ in self.per_k]
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("k values must be strictly increasing")
        for k, t, c in self.per_k:
            if not (0.0 <= t <= 1.0 and 0.0 <= c <= 1.0):
                raise AssertionError(f"T/C out of [0, 1] at k={k}: {t}, {c}")

    @property
    def summary(self) -> tuple[float, float]:
        """Mean and population standard deviation of the overlap fractions."""
        if not self.overlap:
            return float("nan"), float("nan")
        vals = np.array([f for _, f in self.overlap])
        return float(vals.mean()), float(vals.std())

    def write_tc_csv(self, sink: TextIO) -> None:
        w = csv.writer(sink, lineterminator="\n")
        w.writerow(["k", "trustworthiness", "continuity"])
        for k, t, c in self.per_k:
            w.writerow([k, repr(t), repr(c)])

    def write_overlap_csv(self, sink: TextIO) -> None:
        w = csv.writer(sink, lineterminator="\n")
        w.writerow(["token", "overlap"])
        for tok, f in self.overlap:
            w.writerow([tok, repr(f)])
