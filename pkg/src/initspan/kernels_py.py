"""Pure-numpy dynamic programs for the linear-chain CRF.

Reference implementation of the hot kernels; `initspan._ckernels` is the
compiled twin with identical signatures and semantics. All scores are
log-potentials; every sum over paths runs in log space with max-shift
stabilization.

Path score convention, for labels y over T positions:

    start[y0] + sum_t emissions[t, y_t] + sum_t trans[y_{t-1}, y_t] + end[y_{T-1}]
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _lse(a: np.ndarray, axis: int) -> np.ndarray:
    m = np.max(a, axis=axis, keepdims=True)
    return np.squeeze(m + np.log(np.sum(np.exp(a - m), axis=axis, keepdims=True)), axis=axis)


def _forward(emissions, trans, start):
    T = emissions.shape[0]
    alpha = np.empty_like(emissions)
    alpha[0] = start + emissions[0]
    for t in range(1, T):
        alpha[t] = _lse(alpha[t - 1][:, None] + trans, axis=0) + emissions[t]
    return alpha


def log_partition(emissions: np.ndarray, trans: np.ndarray,
                  start: np.ndarray, end: np.ndarray) -> float:
    alpha = _forward(emissions, trans, start)
    return float(_lse(alpha[-1] + end, axis=0))


def forward_backward(emissions: np.ndarray, trans: np.ndarray,
                     start: np.ndarray, end: np.ndarray):
    """Returns (logZ, unary posteriors (T,L), summed pairwise posteriors (L,L))."""
    T, L = emissions.shape
    alpha = _forward(emissions, trans, start)
    beta = np.empty_like(emissions)
    beta[T - 1] = end
    for t in range(T - 2, -1, -1):
        beta[t] = _lse(trans + (emissions[t + 1] + beta[t + 1])[None, :], axis=1)
    log_z = float(_lse(alpha[-1] + end, axis=0))
    unary = np.exp(alpha + beta - log_z)
    pair_sum = np.zeros((L, L))
    for t in range(1, T):
        pair_sum += np.exp(
            alpha[t - 1][:, None] + trans + (emissions[t] + beta[t])[None, :] - log_z
        )
    return log_z, unary, pair_sum


def viterbi(emissions: np.ndarray, trans: np.ndarray,
            start: np.ndarray, end: np.ndarray):
    """Returns (best path score, path as int64 array).

    Ties resolve to the lowest label index: argmax takes the first maximum
    both along the chain and at the final position.
    """
    T, L = emissions.shape
    delta = np.empty_like(emissions)
    back = np.zeros((T, L), dtype=np.int64)
    delta[0] = start + emissions[0]
    for t in range(1, T):
        scores = delta[t - 1][:, None] + trans
        back[t] = np.argmax(scores, axis=0)
        delta[t] = scores[back[t], np.arange(L)] + emissions[t]
    final = delta[-1] + end
    path = np.zeros(T, dtype=np.int64)
    path[-1] = int(np.argmax(final))
    for t in range(T - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return float(final[path[-1]]), path
