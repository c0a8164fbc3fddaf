"""Experiment drivers: neighborhood stability, alignment with/without latent
anchors, latent-word dumps and synthetic model generation.

Every driver is a pure function of its :class:`ExperimentConfig`; results are
returned and, when ``config.out`` is set, written as CSV files whose first
line records the seed.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .align import AlignmentProblem, build_correspondence, lra_align, write_alignment_csv
from .embedding_io import (
    EmbeddingModel,
    SyntheticSpec,
    generate_synthetic_pair,
    read_model,
    write_model,
)
from .geometry import epsilon_neighborhood, row_normalize, similarities_to
from .latent import LatentConfig, generate_latent_words, pair_latent_words
from .metrics import (
    MetricsReport,
    common_vocabulary,
    neighborhood_overlap,
    sample_words,
    trustworthiness_continuity,
)

log = logging.getLogger(__name__)


@dataclass
class ExperimentConfig:
    # inputs: model files, or a synthetic generator when empty
    models: list[str] = field(default_factory=list)
    n: int = 1000
    m: int = 200
    intrinsic_dim: int = 10
    sigma: float = 0.1
    trials: int = 1
    seed: int = 0
    # word sample
    sample: str = "by_rank"
    sample_count: int = 100
    k_values: list[int] = field(default_factory=lambda: [5, 10, 20, 50])
    # neighborhoods and latent words
    center: str = ""
    epsilon: float = 0.5
    neighborhood_size: int = 0  # > 0: choose epsilon to get this many common words
    latent: bool = True
    latent_count: int = 50
    min_terms: int = 2
    max_terms: int = 5
    max_attempts: int = 0  # 0: 50 * latent_count
    # alignment
    backend: str = "lowrank"
    mu: float = 0.5
    lam: float = 0.0  # 0: 0.01 * ||P||_F^2 / n per point set
    k_lle: int = 10
    reg: float = 1e-3
    rho: float = 1.0
    tol: float = 1e-6
    max_iters: int = 500
    d: int = 50
    normalize: bool = False
    metrics_include_latent: bool = False
    # metrics subcommand
    high: str = ""
    low: str = ""
    overlap_k: int = 0  # 0: first of k_values
    out: str = ""

    def __post_init__(self):
        self.k_values = sorted(int(k) for k in self.k_values)
        if not self.k_values:
            raise ValueError("k_values must be nonempty")
        if len(set(self.k_values)) != len(self.k_values):
            raise ValueError("k_values must be distinct")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.backend not in ("lowrank", "lle"):
            raise ValueError(f"backend must be lowrank or lle, not {self.backend!r}")

    def latent_config(self, epsilon: float) -> LatentConfig:
        return LatentConfig(
            epsilon=epsilon,
            target_count=self.latent_count,
            max_attempts=self.max_attempts or None,
            min_terms=self.min_terms,
            max_terms=self.max_terms,
            seed=self.seed,
        )

    def header(self) -> list[str]:
        return [f"seed={self.seed}"]


# ---------------------------------------------------------------------------
# config files

def _convert(f: dataclasses.Field, raw: str):
    kind = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", str(f.type))
    raw = raw.strip()
    if kind == "bool":
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{f.name}: expected on/off, got {raw!r}")
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "list[int]":
        return [int(x) for x in raw.split(",") if x.strip()]
    if kind == "list[str]":
        return [x.strip() for x in raw.split(",") if x.strip()]
    return raw


CONFIG_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment. Keys may use dashes."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_FIELDS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _convert(CONFIG_FIELDS[key], raw)
    return values


def load_config(path=None, **overrides) -> ExperimentConfig:
    values = {}
    if path:
        values.update(parse_config_text(Path(path).read_text(encoding="utf-8")))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values)


# ---------------------------------------------------------------------------
# helpers

def _write_csv(path: Path, header: Sequence[str], rows, comments: Sequence[str]) -> None:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8", newline="\n")


def _fmt(x: float) -> str:
    return repr(float(x))


def _out_dir(config: ExperimentConfig) -> Optional[Path]:
    if not config.out:
        return None
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def trial_seed(config: ExperimentConfig, trial: int) -> int:
    return config.seed + trial


def synthetic_pair(config: ExperimentConfig, trial: int = 0):
    spec = SyntheticSpec(
        config.n, config.m, config.intrinsic_dim, config.sigma, trial_seed(config, trial)
    )
    return generate_synthetic_pair(spec)


def model_pairs(config: ExperimentConfig) -> list[tuple[str, EmbeddingModel, EmbeddingModel]]:
    """Consecutive model pairs: from files, or one synthetic pair per trial."""
    if config.models:
        for p in config.models:
            if not os.path.exists(p):
                raise FileNotFoundError(f"model file not found: {p}")
        if len(config.models) < 2:
            raise ValueError("need at least 2 model instances")
        models = [read_model(p) for p in config.models]
        return [(f"{i}-{i + 1}", models[i], models[i + 1]) for i in range(len(models) - 1)]
    return [(f"t{t}", *synthetic_pair(config, t)) for t in range(config.trials)]


def choose_epsilon(modelA: EmbeddingModel, modelB: EmbeddingModel, center: str, size: int) -> float:
    """Radius giving exactly ``size`` words in both neighborhoods of ``center``.

    A word is common iff its larger cosine distance over the two models is
    below epsilon, so the radius is the midpoint between the size-th and the
    next such distance.
    """
    sa = similarities_to(modelA, modelA.id_of(center))
    sb = similarities_to(modelB, modelB.id_of(center))
    dist = np.sort(
        [
            max(1.0 - sa[i], 1.0 - sb[modelB.id_of(t)])
            for i, t in enumerate(modelA.vocab)
            if t != center and t in modelB
        ]
    )
    if size > len(dist):
        raise ValueError(f"only {len(dist)} shared words; cannot build {size}")
    hi = dist[size] if size < len(dist) else 2.0
    if hi == dist[size - 1]:
        raise ValueError(f"tied distances; no radius gives exactly {size} common words")
    return float(min(2.0, (dist[size - 1] + hi) / 2))


# ---------------------------------------------------------------------------
# stability

@dataclass
class StabilityResult:
    rows: list[tuple[str, str, int, float]]
    summary: list[tuple[int, float, float]]


def run_stability(config: ExperimentConfig) -> StabilityResult:
    """Per-word neighborhood overlap across consecutive model instances."""
    pairs = model_pairs(config)
    rows = []
    for label, a, b in pairs:
        pool = a if not config.models else _common_model(a, b)
        words = sample_words(pool, config.sample, config.sample_count, config.seed)
        for k in config.k_values:
            for word, frac in neighborhood_overlap(a, b, words, k):
                rows.append((label, word, k, frac))
    summary = []
    for k in config.k_values:
        vals = np.array([f for _, _, kk, f in rows if kk == k])
        summary.append((k, float(vals.mean()), float(vals.std())))

    out = _out_dir(config)
    if out is not None:
        _write_csv(
            out / "stability.csv",
            ["pair", "word", "k", "overlap"],
            [(p, w, k, _fmt(f)) for p, w, k, f in rows],
            config.header(),
        )
        _write_csv(
            out / "stability_summary.csv",
            ["k", "mean", "std"],
            [(k, _fmt(mu), _fmt(sd)) for k, mu, sd in summary],
            config.header() + ["std is the population standard deviation over pairs x words"],
        )
    return StabilityResult(rows, summary)


def _common_model(a: EmbeddingModel, b: EmbeddingModel) -> EmbeddingModel:
    from .embedding_io import subset_vocabulary

    return subset_vocabulary(a, common_vocabulary(a, b))


# ---------------------------------------------------------------------------
# alignment

@dataclass
class AlignmentRun:
    epsilon: float
    center: str
    tokens_a: list[str]
    tokens_b: list[str]
    common: list[str]
    latent_count: int
    rows: list[tuple[int, str, float, float]]
    results: dict = field(default_factory=dict)


def _alignment_inputs(config: ExperimentConfig):
    if config.models:
        if len(config.models) != 2:
            raise ValueError("alignment needs exactly 2 model inputs")
        for p in config.models:
            if not os.path.exists(p):
                raise FileNotFoundError(f"model file not found: {p}")
        return read_model(config.models[0]), read_model(config.models[1])
    return synthetic_pair(config, 0)


def _side_tc(high: np.ndarray, low: np.ndarray, k_values) -> np.ndarray:
    return np.array(trustworthiness_continuity(high, low, k_values))[:, 1:]


def run_alignment(config: ExperimentConfig) -> AlignmentRun:
    """Align the center word's neighborhoods of two models with and without anchors.

    T and C are computed per side (high space: that model's vectors, low
    space: its aligned coordinates) over the common neighborhood words,
    then averaged over the two sides.
    """
    A, B = _alignment_inputs(config)
    center = config.center or A.vocab[0]
    for model, name in ((A, "first"), (B, "second")):
        if center not in model:
            raise KeyError(f"center word {center!r} missing from the {name} model")
    if config.neighborhood_size > 0:
        eps = choose_epsilon(A, B, center, config.neighborhood_size)
    else:
        eps = config.epsilon
    hood_a = epsilon_neighborhood(A, A.id_of(center), eps)
    hood_b = epsilon_neighborhood(B, B.id_of(center), eps)
    tokens_a = [center] + [A.vocab[i] for i in hood_a.ids]
    tokens_b = [center] + [B.vocab[i] for i in hood_b.ids]
    in_b = set(tokens_b)
    common = [t for t in tokens_a if t in in_b]
    if len(common) < 2:
        raise ValueError(f"empty common neighborhood around {center!r} at epsilon={eps:g}")
    X = np.array([A.vector(t) for t in tokens_a])
    Y = np.array([B.vector(t) for t in tokens_b])

    variants = [("baseline", [], [])]
    if config.latent:
        la, lb = pair_latent_words(A, B, center, config.latent_config(eps))
        variants.append(("latent", la, lb))
    log.info("center=%s eps=%.4g |A|=%d |B|=%d common=%d", center, eps, len(X), len(Y), len(common))

    run = AlignmentRun(eps, center, tokens_a, tokens_b, common, 0, [])
    pos_a = {t: i for i, t in enumerate(tokens_a)}
    pos_b = {t: i for i, t in enumerate(tokens_b)}
    for name, la, lb in variants:
        labels = [w.label for w in la]
        Xv = np.vstack([X] + [w.vector for w in la]) if la else X
        Yv = np.vstack([Y] + [w.vector for w in lb]) if lb else Y
        if config.normalize:
            Xv, Yv = row_normalize(Xv), row_normalize(Yv)
        C = build_correspondence(tokens_a + labels, tokens_b + labels, list(zip(labels, labels)))
        problem = AlignmentProblem(
            Xv, Yv, C, d=config.d, mu=config.mu, backend=config.backend,
            lam=config.lam or None, k_lle=config.k_lle, reg=config.reg,
            rho=config.rho, tol=config.tol, max_iters=config.max_iters,
        )
        result = lra_align(problem)
        run.results[name] = (result, tokens_a + labels, tokens_b + labels)
        if name == "latent":
            run.latent_count = len(la)

        ia = [pos_a[t] for t in common]
        ib = [pos_b[t] for t in common]
        high_a, high_b = X[ia], Y[ib]
        low_a, low_b = result.FX[ia], result.FY[ib]
        if config.metrics_include_latent and la:
            high_a = np.vstack([high_a] + [w.vector for w in la])
            high_b = np.vstack([high_b] + [w.vector for w in lb])
            low_a = np.vstack([low_a, result.FX[len(X):]])
            low_b = np.vstack([low_b, result.FY[len(Y):]])
        tc = (_side_tc(high_a, low_a, config.k_values) + _side_tc(high_b, low_b, config.k_values)) / 2
        for k, (t, c) in zip(config.k_values, tc):
            run.rows.append((k, name, float(t), float(c)))

    run.rows.sort(key=lambda r: (r[0], r[1]))
    out = _out_dir(config)
    if out is not None:
        comments = config.header() + [
            f"center={center} epsilon={eps!r} common={len(common)} latent={run.latent_count}",
            "T/C per side over common neighborhood words, averaged over both models",
        ]
        _write_csv(
            out / "alignment.csv",
            ["k", "variant", "trustworthiness", "continuity"],
            [(k, v, _fmt(t), _fmt(c)) for k, v, t, c in run.rows],
            comments,
        )
        for name, (result, ta, tb) in run.results.items():
            buf = io.StringIO()
            write_alignment_csv(result, ta, tb, buf, config.header())
            (out / f"coords_{name}.csv").write_text(buf.getvalue(), encoding="utf-8", newline="\n")
    return run


# ---------------------------------------------------------------------------
# latent dump / synth / metrics

def run_latent_dump(config: ExperimentConfig):
    """Latent words around one or more centers of the first model.

    Writes ``latent.txt`` (word2vec text, synthetic labels) and the provenance
    sidecar ``latent_provenance.csv`` (label,center,sources,alphas).
    """
    if config.models:
        model = read_model(config.models[0])
    else:
        model = synthetic_pair(config, 0)[0]
    if config.center:
        centers = [config.center]
    else:
        centers = sample_words(model, config.sample, config.sample_count, config.seed)
    words = []
    lcfg = config.latent_config(config.epsilon)
    for c in centers:
        hood = epsilon_neighborhood(model, model.id_of(c), config.epsilon)
        if len(hood) < lcfg.min_terms:
            log.info("skipping %s: %d neighbors", c, len(hood))
            continue
        words.extend(generate_latent_words(model, hood, lcfg))

    out = _out_dir(config)
    if out is not None:
        m = model.m
        dump = EmbeddingModel(
            tuple(w.label for w in words),
            np.array([w.vector for w in words]).reshape(len(words), m),
        )
        write_model(dump, out / "latent.txt")
        _write_csv(
            out / "latent_provenance.csv",
            ["label", "center", "sources", "alphas"],
            [
                (
                    w.label,
                    model.vocab[w.center],
                    " ".join(model.vocab[i] for i in w.sources),
                    " ".join(str(a) for a in w.alphas),
                )
                for w in words
            ],
            config.header(),
        )
    return model, words


def run_synth(config: ExperimentConfig, paths: Sequence[str]):
    if len(paths) != 2:
        raise ValueError("synth writes exactly two model files")
    a, b = synthetic_pair(config, 0)
    for model, path in zip((a, b), paths):
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        write_model(model, path)
    return a, b


def run_metrics(config: ExperimentConfig) -> MetricsReport:
    """T/C between two models over their common vocabulary, plus overlap."""
    if not (config.high and config.low):
        raise ValueError("metrics needs --high and --low model files")
    high, low = read_model(config.high), read_model(config.low)
    common = common_vocabulary(high, low)
    if len(common) < 3:
        raise ValueError("fewer than 3 common tokens")
    hi = np.array([high.vector(t) for t in common])
    lo = np.array([low.vector(t) for t in common])
    per_k = trustworthiness_continuity(hi, lo, config.k_values)
    pool = _common_model(high, low)
    words = sample_words(pool, config.sample, min(config.sample_count, pool.n), config.seed)
    k = config.overlap_k or config.k_values[0]
    report = MetricsReport(per_k, neighborhood_overlap(high, low, words, k))

    out = _out_dir(config)
    if out is not None:
        buf = io.StringIO()
        for c in config.header():
            buf.write(f"# {c}\n")
        report.write_tc_csv(buf)
        (out / "metrics_tc.csv").write_text(buf.getvalue(), encoding="utf-8", newline="\n")
        mean, std = report.summary
        buf = io.StringIO()
        for c in config.header() + [f"k={k} mean={mean!r} std={std!r}"]:
            buf.write(f"# {c}\n")
        report.write_overlap_csv(buf)
        (out / "metrics_overlap.csv").write_text(buf.getvalue(), encoding="utf-8", newline="\n")
    return report
