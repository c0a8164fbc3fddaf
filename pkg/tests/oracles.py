"""Independent reference implementations used only by the tests."""

import numpy as np


def tc_direct(high, low, k):
    """Trustworthiness and continuity by explicit double loops.

    Neighbor sets are rebuilt from the tables by scanning each row, rather
    than by masking, so this shares no code path with the library.
    """
    high = [list(map(int, row)) for row in high]
    low = [list(map(int, row)) for row in low]
    n = len(high)
    t_pen = 0
    c_pen = 0
    for i in range(n):
        near_high = {j for j in range(n) if j != i and high[i][j] <= k}
        near_low = {j for j in range(n) if j != i and low[i][j] <= k}
        for j in near_low - near_high:
            t_pen += high[i][j] - k
        for j in near_high - near_low:
            c_pen += low[i][j] - k
    scale = n * k * (2 * n - 3 * k - 1)
    return 1.0 - 2.0 * t_pen / scale, 1.0 - 2.0 * c_pen / scale


def random_rank_table(n, rng):
    """Row-wise random permutations of 1..n-1 off the diagonal."""
    ranks = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        others = [j for j in range(n) if j != i]
        ranks[i, others] = rng.permutation(n - 1) + 1
    return ranks


def lle_row_kkt(P, i, neighbors, reg):
    """Weights for row i from the bordered (KKT) system of the constrained LS."""
    k = len(neighbors)
    Z = P[neighbors] - P[i]
    G = Z @ Z.T
    G = G + np.eye(k) * reg * np.trace(G) / k
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = 2 * G
    K[:k, k] = 1.0
    K[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    return np.linalg.solve(K, rhs)[:k]


def low_rank_closed_form(P, lam):
    """Exact minimizer of 0.5||P - RP||_F^2 + lam ||R||_* via the SVD of P."""
    U, s, _ = np.linalg.svd(P, full_matrices=False)
    shrink = np.maximum(0.0, 1.0 - lam / s**2)
    return (U * shrink) @ U.T


def grid_objective_2x2(P, lam, lo, hi, step):
    """Objective on the lattice lo..hi (inclusive) for all 2x2 R; returns min and argmin."""
    vals = np.round(np.arange(lo, hi + step / 2, step), 10)
    a, b, c, d = np.meshgrid(vals, vals, vals, vals, indexing="ij", sparse=True)
    # (I - R) P entries
    e00 = (1 - a) * P[0, 0] - b * P[1, 0]
    e01 = (1 - a) * P[0, 1] - b * P[1, 1]
    e10 = -c * P[0, 0] + (1 - d) * P[1, 0]
    e11 = -c * P[0, 1] + (1 - d) * P[1, 1]
    quad = 0.5 * (e00**2 + e01**2 + e10**2 + e11**2)
    fro2 = a**2 + b**2 + c**2 + d**2
    nuc = np.sqrt(fro2 + 2 * np.abs(a * d - b * c))
    obj = quad + lam * nuc
    idx = np.unravel_index(np.argmin(obj), obj.shape)
    return float(obj[idx]), np.array([[vals[idx[0]], vals[idx[1]]], [vals[idx[2]], vals[idx[3]]]])


def grid_search_2x2(P, lam, box=2.0, step=0.01, window=0.3):
    """Coarse grid over [-box, box]^4, then the exact step-lattice near its optimum."""
    _, R0 = grid_objective_2x2(P, lam, -box, box, 0.1)
    best = np.inf
    # fine lattice restricted to a window, still aligned to multiples of step
    los = np.clip(np.round((R0 - window) / step) * step, -box, box)
    his = np.clip(np.round((R0 + window) / step) * step, -box, box)
    vals = [np.round(np.arange(l, h + step / 2, step), 10) for l, h in zip(los.ravel(), his.ravel())]
    a, b, c, d = np.meshgrid(*vals, indexing="ij", sparse=True)
    e00 = (1 - a) * P[0, 0] - b * P[1, 0]
    e01 = (1 - a) * P[0, 1] - b * P[1, 1]
    e10 = -c * P[0, 0] + (1 - d) * P[1, 0]
    e11 = -c * P[0, 1] + (1 - d) * P[1, 1]
    obj = 0.5 * (e00**2 + e01**2 + e10**2 + e11**2) + lam * np.sqrt(
        a**2 + b**2 + c**2 + d**2 + 2 * np.abs(a * d - b * c)
    )
    best = float(obj.min())
    return best


def procrustes_residual(A, B):
    """Mean row distance after the best orthogonal map of B onto A."""
    U, _, Vt = np.linalg.svd(B.T @ A)
    Q = U @ Vt
    return float(np.mean(np.linalg.norm(A - B @ Q, axis=1)))
