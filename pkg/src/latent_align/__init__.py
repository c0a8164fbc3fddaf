"""Densify word-embedding neighborhoods with latent words and align two models."""

from .align import (
    AlignmentProblem,
    AlignmentResult,
    ConvergenceError,
    CorrespondenceMatrix,
    build_correspondence,
    lle_weights,
    low_rank_weights,
    lra_align,
)
from .embedding_io import (
    EmbeddingFormatError,
    EmbeddingModel,
    SyntheticSpec,
    generate_synthetic_pair,
    load_word2vec_text,
    save_word2vec_text,
    subset_vocabulary,
)
from .geometry import (
    Neighborhood,
    cosine_similarity,
    epsilon_neighborhood,
    k_nearest,
    rank_table,
    unit_normalize,
)
from .latent import LatentConfig, LatentWord, generate_latent_words, pair_latent_words
from .metrics import (
    MetricsReport,
    continuity,
    neighborhood_overlap,
    sample_words,
    trustworthiness,
)

__version__ = "0.1.0"
