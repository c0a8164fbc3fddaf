"""T/C between two models over their common vocabulary, via the loop oracle."""

import numpy as np

from oracles import tc_direct


def _ranks(P):
    n = len(P)
    U = P / np.linalg.norm(P, axis=1, keepdims=True)
    ranks = np.zeros((n, n), dtype=int)
    for i in range(n):
        order = sorted((j for j in range(n) if j != i), key=lambda j: (-(U[i] @ U[j]), j))
        for pos, j in enumerate(order, start=1):
            ranks[i, j] = pos
    return ranks


def tc_from_models(high, low, k):
    common = [t for t in high.vocab if t in low]
    H = np.array([high.vector(t) for t in common])
    L = np.array([low.vector(t) for t in common])
    return tc_direct(_ranks(H), _ranks(L), k)
