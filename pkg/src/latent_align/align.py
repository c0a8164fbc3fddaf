"""Low Rank Alignment of two point sets.

Each set ``P`` gets a reconstruction matrix ``R`` (either classic LLE weights
or a nuclear-norm regularized self-representation solved by ADMM). The joint
coordinates ``F`` minimize

    (1 - mu) * sum_s ||F_s - R_s F_s||^2 + mu * sum_ab C_ab ||F^X_a - F^Y_b||^2

over matrices with orthonormal columns, which is a symmetric eigenproblem.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .geometry import similarity_matrix
from .latent import is_latent_label

NULL_RTOL = 1e-9


class ConvergenceError(RuntimeError):
    """ADMM did not reach the requested tolerance within its iteration budget."""


def lle_weights(P: np.ndarray, k: int, reg: float = 1e-3) -> sp.csr_matrix:
    """Affine reconstruction weights from the ``k`` cosine-nearest neighbors.

    Row ``i`` solves ``min ||p_i - sum_j W_ij p_j||^2`` s.t. ``sum_j W_ij = 1``
    with ``reg * trace(G) / k`` added to the diagonal of the local Gram
    matrix ``G``.
    """
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k must lie in [1, {n - 1}], got {k}")
    if reg < 0:
        raise ValueError("reg must be >= 0")
    sims = similarity_matrix(P)
    np.fill_diagonal(sims, np.inf)
    ids = np.broadcast_to(np.arange(n), (n, n))
    neighbors = np.lexsort((ids, -sims), axis=-1)[:, 1 : k + 1]

    data = np.empty((n, k))
    ones = np.ones(k)
    for i in range(n):
        Z = P[neighbors[i]] - P[i]
        G = Z @ Z.T
        G[np.diag_indices(k)] += reg * np.trace(G) / k
        try:
            w = scipy.linalg.solve(G, ones, assume_a="pos")
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            raise np.linalg.LinAlgError(
                f"singular local Gram system at row {i}; use reg > 0"
            ) from None
        if not np.all(np.isfinite(w)) or w.sum() == 0:
            raise np.linalg.LinAlgError(f"singular local Gram system at row {i}")
        data[i] = w / w.sum()
    indptr = np.arange(0, n * k + 1, k)
    return sp.csr_matrix((data.ravel(), neighbors.ravel(), indptr), shape=(n, n))


def low_rank_objective(P: np.ndarray, R: np.ndarray, lam: float) -> float:
    resid = P - R @ P
    return 0.5 * float(np.sum(resid * resid)) + lam * float(
        np.linalg.svd(R, compute_uv=False).sum()
    )


def singular_value_threshold(X: np.ndarray, tau: float) -> np.ndarray:
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    s = np.maximum(s - tau, 0.0)
    keep = s > 0
    return (U[:, keep] * s[keep]) @ Vt[keep]


@dataclass
class ADMMInfo:
    iterations: int
    converged: bool
    primal_residual: float
    dual_residual: float
    objective: list[float] = field(default_factory=list)


def low_rank_weights(
    P: np.ndarray,
    lam: float,
    rho: float = 1.0,
    max_iters: int = 500,
    tol: float = 1e-6,
    *,
    return_info: bool = False,
    strict: bool = True,
):
    """Nuclear-norm regularized self-representation ``R`` of the rows of ``P``.

    Minimizes ``0.5 * ||P - R P||_F^2 + lam * ||R||_*`` by ADMM on the split
    ``R = Z``. The returned matrix is ``Z``, the thresholded iterate. Raises
    :class:`ConvergenceError` when both residuals are not below ``tol``
    after ``max_iters`` iterations, unless ``strict=False``.
    """
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    if n < 2:
        raise ValueError("need at least 2 points")
    if not np.all(np.isfinite(P)):
        raise ValueError("non-finite input")
    if lam <= 0 or rho <= 0:
        raise ValueError("lam and rho must be positive")

    G = P @ P.T
    # (G + rho I)^{-1} via the eigendecomposition of G, reused every iteration.
    evals, V = np.linalg.eigh(G)
    inv = (V / (np.maximum(evals, 0.0) + rho)) @ V.T
    Z = np.zeros((n, n))
    U = np.zeros((n, n))
    history = [low_rank_objective(P, Z, lam)]
    r_norm = s_norm = np.inf
    it = 0
    converged = False
    for it in range(1, max_iters + 1):
        R = (G + rho * (Z - U)) @ inv
        Z_old = Z
        Z = singular_value_threshold(R + U, lam / rho)
        U = U + R - Z
        r_norm = float(np.linalg.norm(R - Z))
        s_norm = float(rho * np.linalg.norm(Z - Z_old))
        history.append(low_rank_objective(P, Z, lam))
        if r_norm < tol and s_norm < tol:
            converged = True
            break

    info = ADMMInfo(it, converged, r_norm, s_norm, history)
    if not converged and strict:
        raise ConvergenceError(
            f"ADMM stopped after {it} iterations with primal residual "
            f"{r_norm:.3g} and dual residual {s_norm:.3g} (tol {tol:g})"
        )
    return (Z, info) if return_info else Z


@dataclass(frozen=True)
class CorrespondenceMatrix:
    entries: sp.csr_matrix
    tokens_a: tuple[str, ...]
    tokens_b: tuple[str, ...]

    def __post_init__(self):
        C = sp.csr_matrix(self.entries, dtype=float)
        if C.shape != (len(self.tokens_a), len(self.tokens_b)):
            raise ValueError("correspondence shape does not match token lists")
        if not np.all(np.isfinite(C.data)) or np.any((C.data < 0) | (C.data > 1)):
            raise ValueError("correspondence entries must be finite and in [0, 1]")
        if C.count_nonzero() == 0:
            raise ValueError("empty correspondence")
        object.__setattr__(self, "entries", C)
        object.__setattr__(self, "tokens_a", tuple(self.tokens_a))
        object.__setattr__(self, "tokens_b", tuple(self.tokens_b))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def build_correspondence(
    vocab_a: Sequence[str],
    vocab_b: Sequence[str],
    latent_pairs: Sequence[tuple[str, str]] = (),
) -> CorrespondenceMatrix:
    """Ones at shared real words and at explicitly paired latent labels.

    Latent labels never match by name alone: two independently generated
    anchors may share a label without sharing a pattern.
    """
    for vocab in (vocab_a, vocab_b):
        if len(set(vocab)) != len(vocab):
            raise ValueError("token lists must be duplicate-free")
    pos_b = {t: j for j, t in enumerate(vocab_b)}
    pos_a = {t: i for i, t in enumerate(vocab_a)}
    pairs = {
        (i, pos_b[t])
        for i, t in enumerate(vocab_a)
        if t in pos_b and not is_latent_label(t)
    }
    for la, lb in latent_pairs:
        if la not in pos_a or lb not in pos_b:
            raise KeyError(f"latent pair ({la!r}, {lb!r}) not in the token lists")
        pairs.add((pos_a[la], pos_b[lb]))
    if not pairs:
        raise ValueError("empty correspondence: no common tokens and no latent pairs")
    rows, cols = zip(*sorted(pairs))
    C = sp.csr_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(len(vocab_a), len(vocab_b))
    )
    return CorrespondenceMatrix(C, tuple(vocab_a), tuple(vocab_b))


@dataclass
class AlignmentProblem:
    X: np.ndarray
    Y: np.ndarray
    C: CorrespondenceMatrix
    d: int
    mu: float = 0.5
    backend: str = "lowrank"
    lam: Optional[float] = None  # None: 0.01 * ||P||_F^2 / n, per set
    k_lle: int = 10
    reg: float = 1e-3
    rho: float = 1.0
    tol: float = 1e-6
    max_iters: int = 500

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.Y = np.asarray(self.Y, dtype=float)
        n1, n2 = self.X.shape[0], self.Y.shape[0]
        if self.C.shape != (n1, n2):
            raise ValueError(f"C has shape {self.C.shape}, expected {(n1, n2)}")
        if not 0 < self.mu < 1:
            raise ValueError("mu must lie in (0, 1)")
        if not 1 <= self.d <= n1 + n2 - 2:
            raise ValueError(f"d must lie in [1, {n1 + n2 - 2}]")
        if self.backend not in ("lowrank", "lle"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.lam is not None and self.lam <= 0:
            raise ValueError("lam must be positive")


@dataclass
class AlignmentResult:
    F: np.ndarray
    eigenvalues: np.ndarray
    dropped_null_count: int
    n1: int
    admm: list[ADMMInfo] = field(default_factory=list)

    @property
    def FX(self) -> np.ndarray:
        return self.F[: self.n1]

    @property
    def FY(self) -> np.ndarray:
        return self.F[self.n1 :]


def default_lambda(P: np.ndarray) -> float:
    return 0.01 * float(np.sum(P * P)) / P.shape[0]


def reconstruction(P: np.ndarray, problem: AlignmentProblem):
    """Reconstruction matrix of one point set for the configured backend."""
    if problem.backend == "lle":
        return lle_weights(P, problem.k_lle, problem.reg).toarray(), None
    lam = problem.lam if problem.lam is not None else default_lambda(P)
    return low_rank_weights(
        P, lam, problem.rho, problem.max_iters, problem.tol, return_info=True
    )


def alignment_matrix(RX: np.ndarray, RY: np.ndarray, C: sp.spmatrix, mu: float) -> np.ndarray:
    """Symmetric matrix whose bottom eigenvectors are the joint coordinates."""
    n1, n2 = RX.shape[0], RY.shape[0]
    EX = np.eye(n1) - RX
    EY = np.eye(n2) - RY
    M = scipy.linalg.block_diag(EX.T @ EX, EY.T @ EY)
    M = 0.5 * (M + M.T)
    adj = sp.bmat([[None, C], [C.T, None]], format="csr").toarray()
    L = np.diag(adj.sum(axis=1)) - adj
    return (1.0 - mu) * M + mu * L


def lra_align(problem: AlignmentProblem) -> AlignmentResult:
    n1 = problem.X.shape[0]
    RX, info_x = reconstruction(problem.X, problem)
    RY, info_y = reconstruction(problem.Y, problem)
    A = alignment_matrix(RX, RY, problem.C.entries, problem.mu)
    evals, evecs = scipy.linalg.eigh(A)
    null = evals <= NULL_RTOL * evals[-1]
    dropped = int(null.sum())
    available = evals.size - dropped
    if problem.d > available:
        raise ValueError(
            f"d={problem.d} exceeds the {available} non-null eigenvectors"
        )
    keep = np.flatnonzero(~null)[: problem.d]
    return AlignmentResult(
        F=evecs[:, keep],
        eigenvalues=evals[keep],
        dropped_null_count=dropped,
        n1=n1,
        admm=[i for i in (info_x, info_y) if i is not None],
    )


def write_alignment_csv(
    result: AlignmentResult,
    tokens_a: Sequence[str],
    tokens_b: Sequence[str],
    sink: TextIO,
    comments: Sequence[str] = (),
) -> None:
    """CSV with header ``token,side,c1,...,cd``; side is A or B."""
    if len(tokens_a) != result.n1 or len(tokens_b) != result.F.shape[0] - result.n1:
        raise ValueError("token lists do not match the alignment result")
    for line in comments:
        sink.write(f"# {line}\n")
    writer = csv.writer(sink, lineterminator="\n")
    d = result.F.shape[1]
    writer.writerow(["token", "side"] + [f"c{i + 1}" for i in range(d)])
    for side, tokens, block in (("A", tokens_a, result.FX), ("B", tokens_b, result.FY)):
        for tok, row in zip(tokens, block):
            writer.writerow([tok, side] + [repr(float(v)) for v in row])
