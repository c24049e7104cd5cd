"""Brute-force references for small codes: codeword lists, Z, marginals, ML."""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from .tanner import ParityCheckMatrix

MAX_DIMENSION = 22


def kernel_basis(H: ParityCheckMatrix) -> np.ndarray:
    A = H.dense().copy()
    n = H.n_bits
    pivots = []
    r = 0
    for c in range(n):
        if r == A.shape[0]:
            break
        piv = np.flatnonzero(A[r:, c])
        if piv.size == 0:
            continue
        k = r + piv[0]
        A[[r, k]] = A[[k, r]]
        hit = np.flatnonzero(A[:, c])
        hit = hit[hit != r]
        A[hit] ^= A[r]
        pivots.append(c)
        r += 1
    pset = set(pivots)
    free = [c for c in range(n) if c not in pset]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for row, pc in enumerate(pivots):
            basis[t, pc] = A[row, f]
    return basis


def codewords(H: ParityCheckMatrix) -> np.ndarray:
    """All codewords, shape (2**k, N). Only for small dimension k."""
    basis = kernel_basis(H)
    k = basis.shape[0]
    if k > MAX_DIMENSION:
        raise ValueError(f"code dimension {k} too large to enumerate")
    coeffs = ((np.arange(2**k)[:, None] >> np.arange(k)[None, :]) & 1).astype(np.uint8)
    return (coeffs @ basis) % 2


def log_partition_function(H: ParityCheckMatrix, h) -> float:
    """ln Z with Z = sum over codewords of exp(-sum_i h_i sigma_i)."""
    cw = codewords(H)
    return float(logsumexp(-(cw @ np.asarray(h, dtype=float))))


def bit_marginals(H: ParityCheckMatrix, h) -> np.ndarray:
    """Posterior P(sigma_i = 1) for every bit."""
    cw = codewords(H)
    logw = -(cw @ np.asarray(h, dtype=float))
    p = np.exp(logw - logsumexp(logw))
    return p @ cw


def ml_decode(H: ParityCheckMatrix, h) -> np.ndarray:
    cw = codewords(H)
    return cw[int(np.argmin(cw @ np.asarray(h, dtype=float)))]
