"""Latent words: synthetic anchors that densify an epsilon-neighborhood.

A latent word is a signed sum of a few neighborhood members,

    w* = sum_n alpha_n * w_{r_n},   alpha_n in {-1, +1},

kept only when it lands back inside the neighborhood, i.e. when its cosine
distance to the center is below epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .embedding_io import EmbeddingModel
from .geometry import Neighborhood, cosine_similarity, epsilon_neighborhood

LATENT_PREFIX = "⟂"


@dataclass(frozen=True)
class LatentWord:
    vector: np.ndarray
    center: int
    coefficients: tuple[tuple[int, int], ...]
    label: str

    @property
    def sources(self) -> list[int]:
        return [i for i, _ in self.coefficients]

    @property
    def alphas(self) -> list[int]:
        return [a for _, a in self.coefficients]


@dataclass(frozen=True)
class LatentConfig:
    epsilon: float = 0.3
    target_count: int = 20
    max_attempts: Optional[int] = None
    min_terms: int = 2
    max_terms: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.epsilon <= 2:
            raise ValueError("epsilon must lie in (0, 2]")
        if self.target_count < 0:
            raise ValueError("target_count must be >= 0")
        if self.max_attempts is not None and self.max_attempts < self.target_count:
            raise ValueError("max_attempts must be >= target_count")
        if self.min_terms < 2:
            raise ValueError("min_terms must be >= 2")
        if self.max_terms is not None and self.max_terms < self.min_terms:
            raise ValueError("max_terms must be >= min_terms")

    @property
    def attempts(self) -> int:
        if self.max_attempts is None:
            return 50 * self.target_count
        return self.max_attempts

    def terms_range(self, pool_size: int) -> tuple[int, int]:
        hi = self.max_terms if self.max_terms is not None else min(5, pool_size)
        hi = min(hi, pool_size)
        if pool_size < self.min_terms or hi < self.min_terms:
            raise ValueError(
                f"neighborhood too small: {pool_size} members, "
                f"need at least {self.min_terms}"
            )
        return self.min_terms, hi


def latent_label(center_token: str, index: int) -> str:
    return f"{LATENT_PREFIX}{center_token}:{index}"


def is_latent_label(token: str) -> bool:
    return token.startswith(LATENT_PREFIX)


def combine(vectors: np.ndarray, coefficients: Sequence[tuple[int, int]]) -> np.ndarray:
    """Signed sum of rows, accumulated in coefficient order."""
    out = np.zeros(vectors.shape[1])
    for idx, alpha in coefficients:
        out = out + alpha * vectors[idx]
    return out


def cosine_distance(u, v) -> float:
    return 1.0 - cosine_similarity(u, v)


def _is_valid(vector: np.ndarray, center_vec: np.ndarray, epsilon: float) -> bool:
    if not vector.any() or np.linalg.norm(vector) == 0:
        return False
    return cosine_distance(vector, center_vec) < epsilon


def _patterns(rng: np.random.Generator, pool_size: int, lo: int, hi: int, attempts: int):
    """Yield fresh (position, alpha) patterns; duplicates still use up an attempt."""
    seen: set[tuple[tuple[int, int], ...]] = set()
    for _ in range(attempts):
        t = int(rng.integers(lo, hi + 1))
        picks = rng.choice(pool_size, size=t, replace=False)
        alphas = rng.choice(np.array([-1, 1]), size=t)
        pattern = tuple(sorted(zip(picks.tolist(), alphas.tolist())))
        if pattern in seen:
            continue
        seen.add(pattern)
        yield pattern


def generate_latent_words(
    model: EmbeddingModel, neighborhood: Neighborhood, config: LatentConfig
) -> list[LatentWord]:
    """Rejection-sample up to ``config.target_count`` latent words.

    Validity is judged against ``neighborhood.epsilon``. The RNG stream is
    ``config.seed + center id`` so neighborhoods can be processed in any order.
    """
    if config.target_count == 0:
        return []
    members = neighborhood.ids
    lo, hi = config.terms_range(len(members))
    center_vec = model.vectors[neighborhood.center]
    center_tok = model.vocab[neighborhood.center]
    rng = np.random.default_rng(config.seed + neighborhood.center)

    out: list[LatentWord] = []
    for pattern in _patterns(rng, len(members), lo, hi, config.attempts):
        coeffs = tuple((members[p], a) for p, a in pattern)
        vec = combine(model.vectors, coeffs)
        if _is_valid(vec, center_vec, neighborhood.epsilon):
            vec.setflags(write=False)
            out.append(
                LatentWord(vec, neighborhood.center, coeffs, latent_label(center_tok, len(out)))
            )
            if len(out) == config.target_count:
                break
    return out


def common_neighborhood_tokens(
    modelA: EmbeddingModel, modelB: EmbeddingModel, center_token: str, epsilon: float
) -> list[str]:
    """Tokens in both epsilon-neighborhoods of ``center_token``, in model A's order."""
    for model in (modelA, modelB):
        if center_token not in model:
            raise KeyError(f"center {center_token!r} missing from a vocabulary")
    nA = epsilon_neighborhood(modelA, modelA.id_of(center_token), epsilon)
    nB = epsilon_neighborhood(modelB, modelB.id_of(center_token), epsilon)
    in_b = {modelB.vocab[j] for j in nB.ids}
    return [modelA.vocab[i] for i in nA.ids if modelA.vocab[i] in in_b]


def pair_latent_words(
    modelA: EmbeddingModel,
    modelB: EmbeddingModel,
    center_token: str,
    config: LatentConfig,
) -> tuple[list[LatentWord], list[LatentWord]]:
    """Latent words built from identical (token, alpha) patterns in both models.

    Patterns range over the tokens common to both epsilon-neighborhoods and
    are kept only when the resulting vector is valid in both models. Position
    ``i`` of the two returned lists is a cross-model correspondence.
    """
    common = common_neighborhood_tokens(modelA, modelB, center_token, config.epsilon)
    try:
        lo, hi = config.terms_range(len(common))
    except ValueError:
        raise ValueError(
            f"insufficient common neighborhood: {len(common)} shared tokens"
        ) from None
    if config.target_count == 0:
        return [], []
    ca, cb = modelA.id_of(center_token), modelB.id_of(center_token)
    ids_a = [modelA.id_of(t) for t in common]
    ids_b = [modelB.id_of(t) for t in common]
    rng = np.random.default_rng(config.seed + ca)

    out_a: list[LatentWord] = []
    out_b: list[LatentWord] = []
    for pattern in _patterns(rng, len(common), lo, hi, config.attempts):
        coeffs_a = tuple((ids_a[p], a) for p, a in pattern)
        coeffs_b = tuple((ids_b[p], a) for p, a in pattern)
        va = combine(modelA.vectors, coeffs_a)
        vb = combine(modelB.vectors, coeffs_b)
        if _is_valid(va, modelA.vectors[ca], config.epsilon) and _is_valid(
            vb, modelB.vectors[cb], config.epsilon
        ):
            label = latent_label(center_token, len(out_a))
            va.setflags(write=False)
            vb.setflags(write=False)
            out_a.append(LatentWord(va, ca, coeffs_a, label))
            out_b.append(LatentWord(vb, cb, coeffs_b, label))
            if len(out_a) == config.target_count:
                break
    return out_a, out_b
