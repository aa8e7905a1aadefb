"""Batched finite-difference stencils.

All derivative helpers operate on vectorized fields ``f(P) -> (N, *S)`` where
``P`` has shape ``(N, d)``.  Fourth-order central stencils are used throughout;
the step may vary per point (needed near the ball boundary where metric
coefficients blow up like ``(1 - |w|^2)^-2``).
"""

from __future__ import annotations

import numpy as np

# offsets / weights of the 4th-order first-derivative stencil
_OFF1 = np.array([-2.0, -1.0, 1.0, 2.0])
_W1 = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
# same-axis second derivative (uses the center point as well)
_OFF2 = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
_W2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def _as_h(P: np.ndarray, h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.ndim == 0:
        h = np.full(P.shape[0], float(h))
    return h


def fd_gradient(f, P: np.ndarray, h) -> np.ndarray:
    """First derivatives d_i f at each point.

    Returns an array of shape ``(N, d, *S)`` with the derivative axis first.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    n, d = P.shape
    h = _as_h(P, h)
    shifted = np.empty((4, d, n, d))
    for a, off in enumerate(_OFF1):
        for i in range(d):
            Q = P.copy()
            Q[:, i] += off * h
            shifted[a, i] = Q
    vals = f(shifted.reshape(4 * d * n, d))
    vals = np.asarray(vals).reshape((4, d, n) + np.shape(vals)[1:])
    out = np.einsum("a,ain...->ni...", _W1, vals)
    return out / h.reshape((n,) + (1,) * (out.ndim - 1))


def fd_jet2(f, P: np.ndarray, h):
    """Value, gradient and Hessian of a batched field.

    Returns ``(f0, d1, d2)`` of shapes ``(N, *S)``, ``(N, d, *S)`` and
    ``(N, d, d, *S)``.  Mixed second derivatives come from the tensor product
    of two first-derivative stencils (16 evaluations per axis pair).
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    n, d = P.shape
    h = _as_h(P, h)

    batches = [P]
    # axis shifts, offsets -2..2 excluding 0
    for off in _OFF1:
        for i in range(d):
            Q = P.copy()
            Q[:, i] += off * h
            batches.append(Q)
    # mixed shifts for i < j
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    for i, j in pairs:
        for oa in _OFF1:
            for ob in _OFF1:
                Q = P.copy()
                Q[:, i] += oa * h
                Q[:, j] += ob * h
                batches.append(Q)

    vals = f(np.concatenate(batches, axis=0))
    vals = np.asarray(vals)
    S = vals.shape[1:]
    blocks = vals.reshape((len(batches), n) + S)

    f0 = blocks[0]
    ax = blocks[1 : 1 + 4 * d].reshape((4, d, n) + S)

    hcol = h.reshape((n,) + (1,) * len(S))
    d1 = np.einsum("a,ain...->ni...", _W1, ax) / hcol[:, None]

    d2 = np.zeros((n, d, d) + S, dtype=vals.dtype)
    # same-axis second derivatives reuse the first-derivative points
    for i in range(d):
        acc = _W2[2] * f0.astype(vals.dtype).copy()
        for a, off in enumerate(_OFF1):
            widx = int(off) + 2
            acc = acc + _W2[widx] * ax[a, i]
        d2[:, i, i] = acc / (hcol * hcol)
    base = 1 + 4 * d
    for p_idx, (i, j) in enumerate(pairs):
        chunk = blocks[base + 16 * p_idx : base + 16 * (p_idx + 1)]
        chunk = chunk.reshape((4, 4, n) + S)
        mixed = np.einsum("a,b,abn...->n...", _W1, _W1, chunk) / (hcol * hcol)
        d2[:, i, j] = mixed
        d2[:, j, i] = mixed
    return f0, d1, d2


def fd_directional(f, P: np.ndarray, X: np.ndarray, h) -> np.ndarray:
    """Directional derivative d_X f along per-point directions ``X``."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = P.shape[0]
    h = _as_h(P, h)
    batches = [P + off * h[:, None] * X for off in _OFF1]
    vals = np.asarray(f(np.concatenate(batches, axis=0)))
    blocks = vals.reshape((4, n) + vals.shape[1:])
    out = np.einsum("a,an...->n...", _W1, blocks)
    return out / h.reshape((n,) + (1,) * (out.ndim - 1))
