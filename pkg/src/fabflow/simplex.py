"""Geometry helpers for the transfer-probability simplex.

Points live in R^(n+1) with coordinates summing to 1; admissible search
directions live in the sum-zero subspace.  Everything here is deterministic:
start points come from a Halton sequence, direction sets from a fixed-seed
generator, so repeated runs probe identical points.
"""
from __future__ import annotations

import numpy as np

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# seed for the fixed direction sets used by fluctuation probes
_DIRECTION_SEED = 20260823


def project_sum_zero(v: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the tangent space {x : sum(x) = 0}."""
    v = np.asarray(v, dtype=float)
    return v - v.mean()


def _radical_inverse(index: int, base: int) -> float:
    out, f = 0.0, 1.0 / base
    while index > 0:
        out += f * (index % base)
        index //= base
        f /= base
    return out


def halton(count: int, dims: int) -> np.ndarray:
    """First `count` points of the Halton sequence in [0,1)^dims (1-based)."""
    if dims > len(_PRIMES):
        raise ValueError(f"halton supports at most {len(_PRIMES)} dimensions")
    pts = np.empty((count, dims))
    for i in range(count):
        for d in range(dims):
            pts[i, d] = _radical_inverse(i + 1, _PRIMES[d])
    return pts

def halton_simplex(count: int, dim: int) -> np.ndarray:
    """Low-discrepancy points on the probability simplex with `dim` coordinates.

    Uses the sorted-uniform spacings map: a Halton point in [0,1)^(dim-1) is
    sorted and the gaps of the unit interval become simplex coordinates.
    """
    if dim < 2:
        return np.ones((count, 1))
    cube = halton(count, dim - 1)
    cube.sort(axis=1)
    padded = np.hstack([np.zeros((count, 1)), cube, np.ones((count, 1))])
    return np.diff(padded, axis=1)


def project_capped_simplex(v: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {p : sum(p) = 1, lower <= p <= upper}.

    Bisection on the dual shift tau: sum(clip(v - tau, lower, upper)) is
    non-increasing in tau, so the root bracket just needs to be wide enough.
    Requires sum(lower) <= 1 <= sum(upper).
    """
    v = np.asarray(v, dtype=float)
    lower = np.broadcast_to(np.asarray(lower, dtype=float), v.shape)
    upper = np.broadcast_to(np.asarray(upper, dtype=float), v.shape)
    if lower.sum() > 1.0 + 1e-12 or upper.sum() < 1.0 - 1e-12:
        raise ValueError("capped simplex is empty for these bounds")
    lo = (v - upper).min() - 1.0
    hi = (v - lower).max() + 1.0
    for _ in range(200):
        tau = 0.5 * (lo + hi)
        s = np.clip(v - tau, lower, upper).sum()
        if s > 1.0:
            lo = tau
        else:
            hi = tau
    out = np.clip(v - 0.5 * (lo + hi), lower, upper)
    # kill the last bisection residue so downstream sum checks at 1e-12 hold
    gap = 1.0 - out.sum()
    if abs(gap) > 0:
        free = (out > lower + 1e-15) & (out < upper - 1e-15) if gap < 0 else (out < upper - 1e-15)
        idx = np.flatnonzero(free)
        if idx.size:
            out[idx] += gap / idx.size
            out = np.clip(out, lower, upper)
    return out


def unit_directions(count: int, dim: int, seed: int = _DIRECTION_SEED) -> np.ndarray:
    """`count` deterministic unit vectors in the sum-zero subspace of R^dim.

    Half the set is generated from seeded Gaussians, the other half is the
    negation, so probes are sign-symmetric.
    """
    if dim < 2:
        return np.zeros((count, dim))
    rng = np.random.default_rng(seed)
    half = (count + 1) // 2
    raw = rng.standard_normal((half, dim))
    raw -= raw.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    raw /= norms
    full = np.vstack([raw, -raw])
    return full[:count]
