import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from latent_align.embedding_io import (
    EmbeddingFormatError,
    EmbeddingModel,
    SyntheticSpec,
    generate_synthetic_pair,
    load_word2vec_text,
    save_word2vec_text,
    subset_vocabulary,
)
from latent_align.geometry import similarity_matrix
from latent_align.metrics import neighborhood_overlap, sample_words


def load(text):
    return load_word2vec_text(io.StringIO(text))


def roundtrip(model):
    buf = io.StringIO()
    save_word2vec_text(model, buf)
    buf.seek(0)
    return load_word2vec_text(buf)


def test_load_basic():
    model = load("2 3\napple 1.0 0.0 0.0\nbanana 0.0 1.0 0.0")
    assert model.n == 2 and model.m == 3
    assert model.vocab == ("apple", "banana")
    np.testing.assert_array_equal(model.vectors, [[1, 0, 0], [0, 1, 0]])
    assert model.normalized


def test_load_exponents_and_trailing_space():
    model = load("1 2\nx 1e-3 -2.5E+1 \n")
    np.testing.assert_array_equal(model.vectors, [[1e-3, -25.0]])
    assert not model.normalized


@pytest.mark.parametrize(
    "text, msg",
    [
        ("1 2\nx 1.0", "wrong value count"),
        ("2 2\na 1 0\na 0 1", "duplicate token"),
        ("two 2\na 1 0", "malformed header"),
        ("2\na 1 0", "malformed header"),
        ("1 2\na nan 1", "non-finite"),
        ("1 2\na inf 1", "non-finite"),
        ("1 2\na 0 0", "zero vector"),
        ("2 2\na 1 0", "expected 2 rows"),
        ("1 2\na 1 0\nb 0 1", "more than 1"),
        ("1 2\na 1 x", "bad number"),
    ],
)
def test_load_errors(text, msg):
    with pytest.raises(EmbeddingFormatError, match=msg):
        load(text)


def test_save_header():
    model = EmbeddingModel(("a", "b"), np.eye(2, 3))
    buf = io.StringIO()
    save_word2vec_text(model, buf)
    assert buf.getvalue().startswith("2 3\n")
    assert buf.getvalue().endswith("\n")


def test_save_synthetic_roundtrip():
    model, _ = generate_synthetic_pair(SyntheticSpec(n=100, m=10, intrinsic_dim=3, seed=7))
    back = roundtrip(model)
    assert back.vocab == model.vocab
    np.testing.assert_allclose(back.vectors, model.vectors, rtol=1e-12, atol=0)


tokens = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Zs", "Zl", "Zp", "Cc")),
    min_size=1,
    max_size=8,
)


@st.composite
def models(draw):
    vocab = draw(st.lists(tokens, min_size=1, max_size=8, unique=True))
    m = draw(st.integers(1, 5))
    vals = draw(
        hnp.arrays(
            float,
            (len(vocab), m),
            elements=st.floats(-1e6, 1e6, allow_nan=False, allow_subnormal=False),
        )
    )
    vals[~vals.any(axis=1), 0] = 1.0
    return EmbeddingModel(tuple(vocab), vals)


@settings(max_examples=60, deadline=None)
@given(models())
def test_roundtrip_property(model):
    back = roundtrip(model)
    assert back.vocab == model.vocab
    np.testing.assert_allclose(back.vectors, model.vectors, rtol=1e-12, atol=0)


def test_model_rejects_whitespace_tokens():
    with pytest.raises(EmbeddingFormatError):
        EmbeddingModel(("a b",), np.ones((1, 2)))


def test_model_is_read_only():
    model = EmbeddingModel(("a",), np.ones((1, 2)))
    with pytest.raises(ValueError):
        model.vectors[0, 0] = 3.0


def test_subset():
    model = EmbeddingModel(("a", "b", "c"), np.arange(1, 7, dtype=float).reshape(3, 2))
    assert subset_vocabulary(model, set(model.vocab)) == model
    empty = subset_vocabulary(model, set())
    assert empty.n == 0 and empty.m == 2
    sub = subset_vocabulary(model, {"c", "b"})
    assert sub.vocab == ("b", "c")
    np.testing.assert_array_equal(sub.vectors, model.vectors[1:])
    with pytest.raises(KeyError):
        subset_vocabulary(model, {"zz"})


def test_synthetic_isometry_when_noise_free():
    a, b = generate_synthetic_pair(SyntheticSpec(n=60, m=8, intrinsic_dim=3, seed=4))
    assert a.vocab == b.vocab == tuple(f"w{i}" for i in range(60))
    np.testing.assert_allclose(similarity_matrix(a), similarity_matrix(b), atol=1e-9)
    # rows of the first model lie on a 3-plane
    assert np.linalg.matrix_rank(a.vectors, tol=1e-9) == 3


def test_synthetic_determinism():
    spec = SyntheticSpec(n=30, m=6, intrinsic_dim=2, noise_sigma=0.1, seed=11)
    a1, b1 = generate_synthetic_pair(spec)
    a2, b2 = generate_synthetic_pair(spec)
    assert a1.vectors.tobytes() == a2.vectors.tobytes()
    assert b1.vectors.tobytes() == b2.vectors.tobytes()


def test_synthetic_noise_lowers_overlap():
    def mean_overlap(sigma):
        a, b = generate_synthetic_pair(SyntheticSpec(500, 50, 2, sigma, seed=1))
        words = sample_words(a, "by_rank", 100)
        return np.mean([f for _, f in neighborhood_overlap(a, b, words, 10)])

    low_noise, high_noise = mean_overlap(0.05), mean_overlap(0.5)
    assert low_noise < 1.0
    assert low_noise > high_noise


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n=0, m=3, intrinsic_dim=1),
        dict(n=5, m=3, intrinsic_dim=4),
        dict(n=5, m=3, intrinsic_dim=0),
        dict(n=5, m=3, intrinsic_dim=2, noise_sigma=-1.0),
    ],
)
def test_invalid_synthetic_spec(kwargs):
    with pytest.raises(ValueError):
        SyntheticSpec(**kwargs)
