"""Fuzzy c-means clustering.

Minimizes the weighted within-cluster scatter

    J(U, C) = sum_i sum_j u_ij^m ||x_i - c_j||^2

by alternating the two closed-form updates:

    u_ij = 1 / sum_l (d_ij / d_il)^(2 / (m - 1))        (memberships)
    c_j  = sum_i u_ij^m x_i / sum_i u_ij^m              (centroids)

with d_ij the Euclidean distance from point i to centroid j. Iteration stops
when max |U_new - U| < tol or after max_iter sweeps. Each half-step is the
exact minimizer of J with the other block fixed, so the recorded objective
trace is non-increasing.

Initialization is seeded and fully deterministic: centroids are chosen by
k-means++ style sampling driven by ``numpy.random.default_rng(seed)``, and the
initial membership matrix is the membership update evaluated at those
centroids (inverse-distance weights).

Singularity rule: when a point coincides with one or more centroids
(d_ij = 0), its membership is split uniformly over the zero-distance
centroids and is 0 elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidClusterCount, TooFewPoints

K_MIN = 2
K_MAX = 8

DEFAULT_M = 2.0
DEFAULT_TOL = 1e-5
DEFAULT_MAX_ITER = 300


@dataclass(frozen=True)
class ClusterModel:
    """A fitted fuzzy c-means model over n points in d dimensions."""

    k: int
    m: float
    centroids: np.ndarray          # (k, d)
    membership: np.ndarray         # (n, k), rows sum to 1
    objective_trace: tuple[float, ...]
    seed: int
    iterations: int
    converged: bool
    fingerprint: str = ""          # identity of the embedding set it was fitted on

    def hard_assignment(self) -> np.ndarray:
        return hard_assign(self)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "m": self.m,
            "centroids": self.centroids.tolist(),
            "membership": self.membership.tolist(),
            "objective_trace": list(self.objective_trace),
            "seed": self.seed,
            "iterations": self.iterations,
            "converged": self.converged,
            "fingerprint": self.fingerprint,
        }


def _distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Euclidean distance matrix, shape (n, k)."""
    deltas = points[:, None, :] - centroids[None, :, :]
    return np.sqrt(np.einsum("nkd,nkd->nk", deltas, deltas))


def _memberships(points: np.ndarray, centroids: np.ndarray, m: float) -> np.ndarray:
    dist = _distances(points, centroids)
    zero_rows = dist <= 1e-12
    u = np.zeros_like(dist)
    exponent = 2.0 / (m - 1.0)

    regular = ~zero_rows.any(axis=1)
    if regular.any():
        d = dist[regular]
        # u_ij = 1 / sum_l (d_ij / d_il)^exp, computed stably via reciprocal powers
        inv = d ** (-exponent)
        u[regular] = inv / inv.sum(axis=1, keepdims=True)
    singular = ~regular
    if singular.any():
        mask = zero_rows[singular]
        u[singular] = mask / mask.sum(axis=1, keepdims=True)
    return u


def _centroids(points: np.ndarray, u: np.ndarray, m: float) -> np.ndarray:
    weights = u ** m
    denom = weights.sum(axis=0)
    # a cluster losing all weight keeps its previous points' mean undefined;
    # guard with uniform weights so the update stays finite
    empty = denom <= 1e-300
    if empty.any():
        weights[:, empty] = 1.0 / len(points)
        denom = weights.sum(axis=0)
    return (weights.T @ points) / denom[:, None]


def _objective(points: np.ndarray, centroids: np.ndarray, u: np.ndarray, m: float) -> float:
    dist_sq = _distances(points, centroids) ** 2
    return float(np.sum((u ** m) * dist_sq))


def _seed_centroids(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ style seeding: spread initial centroids by squared distance."""
    n = len(points)
    chosen = [int(rng.integers(n))]
    for _ in range(1, k):
        d_sq = np.min(
            [np.sum((points - points[c]) ** 2, axis=1) for c in chosen], axis=0)
        total = d_sq.sum()
        if total <= 1e-300:
            chosen.append(int(rng.integers(n)))
            continue
        cumulative = np.cumsum(d_sq / total)
        idx = int(np.searchsorted(cumulative, rng.random()))
        chosen.append(min(idx, n - 1))
    return points[chosen].copy()


def fcm_fit(points: np.ndarray, k: int, m: float = DEFAULT_M, tol: float = DEFAULT_TOL,
            max_iter: int = DEFAULT_MAX_ITER, seed: int = 0) -> ClusterModel:
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError("points must be a 2-D array")
    if not K_MIN <= k <= K_MAX:
        raise InvalidClusterCount(f"k={k} outside [{K_MIN}, {K_MAX}]")
    if len(points) < k:
        raise TooFewPoints(f"{len(points)} points cannot form {k} clusters")
    if m <= 1.0:
        raise ValueError("fuzzifier m must exceed 1")
    if tol <= 0.0:
        raise ValueError("tol must be positive")

    rng = np.random.default_rng(seed)
    centroids = _seed_centroids(points, k, rng)
    u = _memberships(points, centroids, m)

    trace: list[float] = []
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        centroids = _centroids(points, u, m)
        u_next = _memberships(points, centroids, m)
        trace.append(_objective(points, centroids, u_next, m))
        delta = float(np.max(np.abs(u_next - u)))
        u = u_next
        if delta < tol:
            converged = True
            break

    return ClusterModel(
        k=k, m=m, centroids=centroids, membership=u,
        objective_trace=tuple(trace), seed=seed,
        iterations=iterations, converged=converged,
    )


def hard_assign(model: ClusterModel) -> np.ndarray:
    """Argmax over membership rows; ties resolve to the lowest cluster index."""
    return np.argmax(model.membership, axis=1)
