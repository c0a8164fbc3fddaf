"""
Densifying a neighborhood with latent words
===========================================

A latent word is a signed sum of a few neighbors of a center word. It is
kept only when it falls back into the center's epsilon-neighborhood.
"""

import numpy as np

from latent_align import (
    LatentConfig,
    SyntheticSpec,
    epsilon_neighborhood,
    generate_latent_words,
    generate_synthetic_pair,
    pair_latent_words,
)

model, other = generate_synthetic_pair(SyntheticSpec(500, 50, 5, noise_sigma=0.05, seed=0))

###############################################################################
# The epsilon-neighborhood uses cosine distance (1 - cosine similarity).
hood = epsilon_neighborhood(model, model.id_of("w0"), epsilon=0.4)
print(f"{len(hood)} words within cosine distance 0.4 of w0")
for tok_id, sim in hood.members[:5]:
    print(f"  {model.vocab[tok_id]:>5s}  similarity {sim:.3f}")

###############################################################################
# Rejection sampling: 2 to 5 members, coefficients +1/-1.
words = generate_latent_words(model, hood, LatentConfig(epsilon=0.4, target_count=10, seed=1))
center = model.vector("w0")
for w in words[:5]:
    terms = " ".join(f"{'+' if a > 0 else '-'}{model.vocab[i]}" for i, a in w.coefficients)
    dist = 1 - w.vector @ center / np.linalg.norm(w.vector) / np.linalg.norm(center)
    print(f"{w.label}: {terms:<30s} distance {dist:.3f}")

###############################################################################
# For alignment the same pattern is applied in both models and kept only if
# it is valid in each, which gives a cross-model correspondence for free.
la, lb = pair_latent_words(model, other, "w0", LatentConfig(epsilon=0.4, target_count=10, seed=1))
print(f"{len(la)} paired anchors; first pattern {la[0].coefficients}")
