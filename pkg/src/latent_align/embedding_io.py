"""Embedding models: word2vec text I/O, subsetting and synthetic "retrained" pairs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np


class EmbeddingFormatError(ValueError):
    """Raised when a word2vec text stream or a model violates its contract."""


@dataclass(frozen=True, eq=False)
class EmbeddingModel:
    """Ordered vocabulary plus an ``n x m`` matrix of word vectors.

    The matrix is copied and made read-only on construction so a model can be
    shared between threads without defensive copies.
    """

    vocab: tuple[str, ...]
    vectors: np.ndarray
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vocab = tuple(self.vocab)
        vectors = np.array(self.vectors, dtype=float, copy=True)
        if vectors.ndim != 2:
            if vectors.size == 0 and len(vocab) == 0:
                vectors = vectors.reshape(0, 0)
            else:
                raise EmbeddingFormatError("vectors must be a 2-D matrix")
        if vectors.shape[0] != len(vocab):
            raise EmbeddingFormatError(
                f"{len(vocab)} tokens but {vectors.shape[0]} vector rows"
            )
        index: dict[str, int] = {}
        for i, tok in enumerate(vocab):
            if not isinstance(tok, str) or not tok or any(c.isspace() for c in tok):
                raise EmbeddingFormatError(f"invalid token {tok!r}")
            if tok in index:
                raise EmbeddingFormatError(f"duplicate token {tok!r}")
            index[tok] = i
        if not np.all(np.isfinite(vectors)):
            raise EmbeddingFormatError("non-finite value in vectors")
        if len(vocab) and vectors.shape[1] and np.any(~vectors.any(axis=1)):
            bad = vocab[int(np.flatnonzero(~vectors.any(axis=1))[0])]
            raise EmbeddingFormatError(f"zero vector for token {bad!r}")
        if len(vocab) and vectors.shape[1] == 0:
            raise EmbeddingFormatError("zero vector rows (dimension 0)")
        vectors.setflags(write=False)
        object.__setattr__(self, "vocab", vocab)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "index", index)

    def __eq__(self, other):
        if not isinstance(other, EmbeddingModel):
            return NotImplemented
        return self.vocab == other.vocab and np.array_equal(self.vectors, other.vectors)

    __hash__ = None

    @property
    def n(self) -> int:
        return len(self.vocab)

    @property
    def m(self) -> int:
        return self.vectors.shape[1]

    @property
    def normalized(self) -> bool:
        if self.n == 0:
            return True
        norms = np.linalg.norm(self.vectors, axis=1)
        return bool(np.all(np.abs(norms - 1.0) <= 1e-9))

    def id_of(self, token: str) -> int:
        try:
            return self.index[token]
        except KeyError:
            raise KeyError(f"unknown token {token!r}") from None

    def __contains__(self, token: object) -> bool:
        return token in self.index

    def vector(self, token: str) -> np.ndarray:
        return self.vectors[self.id_of(token)]


@dataclass(frozen=True)
class SyntheticSpec:
    n: int
    m: int
    intrinsic_dim: int
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 1 <= self.intrinsic_dim <= self.m:
            raise ValueError("need 1 <= intrinsic_dim <= m")
        if not self.noise_sigma >= 0:
            raise ValueError("noise_sigma must be >= 0")


def load_word2vec_text(source: TextIO) -> EmbeddingModel:
    """Parse a word2vec text stream (``"n m"`` header, then ``n`` rows)."""
    header = source.readline()
    parts = header.split()
    if len(parts) != 2:
        raise EmbeddingFormatError(f"malformed header {header.strip()!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise EmbeddingFormatError(f"malformed header {header.strip()!r}") from None
    if n < 0 or m < 0:
        raise EmbeddingFormatError(f"malformed header {header.strip()!r}")

    vocab: list[str] = []
    vectors = np.empty((n, m), dtype=float)
    seen: set[str] = set()
    lineno = 1
    for line in source:
        lineno += 1
        if not line.strip():
            continue
        if len(vocab) == n:
            raise EmbeddingFormatError(f"line {lineno}: more than {n} rows")
        fields = line.split(" ")
        fields[-1] = fields[-1].rstrip("\r\n")
        fields = [f for f in fields if f != ""]
        token, values = fields[0], fields[1:]
        if len(values) != m:
            raise EmbeddingFormatError(
                f"line {lineno}: wrong value count ({len(values)} != {m})"
            )
        if token in seen:
            raise EmbeddingFormatError(f"line {lineno}: duplicate token {token!r}")
        try:
            row = np.array([float(v) for v in values])
        except ValueError:
            raise EmbeddingFormatError(f"line {lineno}: bad number") from None
        if not np.all(np.isfinite(row)):
            raise EmbeddingFormatError(f"line {lineno}: non-finite value")
        if m and not row.any():
            raise EmbeddingFormatError(f"line {lineno}: zero vector for {token!r}")
        seen.add(token)
        vectors[len(vocab)] = row
        vocab.append(token)
    if len(vocab) != n:
        raise EmbeddingFormatError(f"expected {n} rows, found {len(vocab)}")
    return EmbeddingModel(tuple(vocab), vectors)


def save_word2vec_text(model: EmbeddingModel, sink: TextIO) -> None:
    """Write ``model`` in word2vec text format.

    Values are written with ``repr`` so that reloading is exact.
    """
    sink.write(f"{model.n} {model.m}\n")
    for tok, row in zip(model.vocab, model.vectors):
        sink.write(tok + " " + " ".join(repr(float(v)) for v in row) + "\n")


def read_model(path) -> EmbeddingModel:
    with open(path, encoding="utf-8", newline="\n") as fh:
        return load_word2vec_text(fh)


def write_model(model: EmbeddingModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        save_word2vec_text(model, fh)


def subset_vocabulary(model: EmbeddingModel, words: Iterable[str]) -> EmbeddingModel:
    """Restrict ``model`` to ``words``, keeping the model's own token order."""
    wanted = set(words)
    unknown = wanted.difference(model.index)
    if unknown:
        raise KeyError(f"unknown token(s): {sorted(unknown)[:5]}")
    rows = [i for i, tok in enumerate(model.vocab) if tok in wanted]
    return EmbeddingModel(
        tuple(model.vocab[i] for i in rows),
        model.vectors[rows].reshape(len(rows), model.m),
    )


def random_rotation(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal ``m x m`` matrix."""
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    return q * np.sign(np.diag(r))


def generate_synthetic_pair(spec: SyntheticSpec) -> tuple[EmbeddingModel, EmbeddingModel]:
    """Two "retrained" instances of one model.

    The first model samples ``n`` Gaussian points on a random
    ``intrinsic_dim``-plane through the origin of R^m. The second is an
    independent random rotation of the first plus i.i.d. Gaussian noise of
    standard deviation ``noise_sigma``.
    """
    rng = np.random.default_rng(spec.seed)
    basis, _ = np.linalg.qr(rng.standard_normal((spec.m, spec.intrinsic_dim)))
    coords = rng.standard_normal((spec.n, spec.intrinsic_dim))
    first = coords @ basis.T
    rotation = random_rotation(spec.m, rng)
    # Noise is always drawn so that pairs differing only in sigma share
    # every other random quantity.
    noise = rng.standard_normal((spec.n, spec.m))
    second = first @ rotation + spec.noise_sigma * noise
    vocab = tuple(f"w{i}" for i in range(spec.n))
    return EmbeddingModel(vocab, first), EmbeddingModel(vocab, second)
