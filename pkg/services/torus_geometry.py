import logging
from typing import List, Sequence, Tuple

import numpy as np

from config.settings import NUMERICS
from models.errors import BoundInvariantError, ClumpValidationError, NodeSetError
from models.fourier_models import ClumpsParams, NodeSet, wrap  # noqa: F401 (re-exported)

logger = logging.getLogger(__name__)


def torus_distance(a: float, b: float) -> float:
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


def _torus_abs(diff: np.ndarray) -> np.ndarray:
    d = np.abs(diff) % 1.0
    return np.minimum(d, 1.0 - d)


def pairwise_distances(X: NodeSet) -> np.ndarray:
    pts = X.array
    return _torus_abs(pts[:, None] - pts[None, :])


def distances_to(x: float, X: NodeSet) -> np.ndarray:
    return _torus_abs(X.array - x)


def _check_tau(tau: float):
    if not (0.0 < tau <= 0.5):
        raise ValueError(f"tau must lie in (0, 1/2], got {tau}")


def min_separation(X: NodeSet) -> float:
    if X.s < 2:
        raise NodeSetError("Minimum separation needs at least two nodes")
    pts = X.array
    gaps = np.diff(pts)
    wrap_gap = 1.0 - pts[-1] + pts[0]
    return float(min(gaps.min(), wrap_gap))


def local_sparsity(tau: float, X: NodeSet) -> int:
    """Largest number of nodes in a closed tau-ball centred at a node"""
    _check_tau(tau)
    if X.s == 0:
        return 0
    inside = pairwise_distances(X) <= tau + NUMERICS.geom_tol
    return int(inside.sum(axis=1).max())


def density_criterion(m: int, tau: float, X: NodeSet) -> bool:
    nu = local_sparsity(tau, X)
    # relative slack absorbs round-off in 3*nu/tau at exact equality
    return 3 * nu / tau <= m * (1.0 + NUMERICS.geom_tol)


def neighborhood_split(x: float, tau: float, X: NodeSet) -> Tuple[NodeSet, NodeSet]:
    """Split X into the bad set (within tau of x) and the good set (the rest)"""
    _check_tau(tau)
    if X.s == 0:
        return NodeSet(), NodeSet()
    near = distances_to(x, X) <= tau + NUMERICS.geom_tol
    bad = X.subset(np.flatnonzero(near))
    good = X.subset(np.flatnonzero(~near))
    return bad, good


def one_sided_clique(tau: float, X: NodeSet) -> int:
    """Largest number of nodes in a half-window [x, x + tau]; these are pairwise within tau"""
    _check_tau(tau)
    if X.s == 0:
        return 0
    pts = X.array
    ahead = (pts[None, :] - pts[:, None]) % 1.0
    return int((ahead <= tau + NUMERICS.geom_tol).sum(axis=1).max())


def sparsity_decomposition(tau: float, W: NodeSet) -> List[NodeSet]:
    """
    Partition W into nu(tau, W) subsets, each with minimum separation > tau.

    Points are visited counterclockwise starting from min(W) and placed into the
    lowest-index subset holding no point within tau. If the greedy pass opens
    fewer than nu subsets, the last point of the largest subset is split off until
    exactly nu subsets exist.
    """
    if W.s == 0:
        raise NodeSetError("Cannot decompose an empty node set")
    nu = local_sparsity(tau, W)
    D = pairwise_distances(W)
    close = D <= tau + NUMERICS.geom_tol

    parts: List[List[int]] = []
    for i in range(W.s):
        for part in parts:
            if not close[i, part].any():
                part.append(i)
                break
        else:
            if len(parts) >= nu:
                raise BoundInvariantError(f"Point {W[i]} fits none of the {nu} sparsity parts")
            parts.append([i])

    while len(parts) < nu:
        largest = max(parts, key=len)
        parts.append([largest.pop()])

    logger.debug(f"Sparsity decomposition of {W.s} points at tau={tau:.6g}: {[len(p) for p in parts]}")
    return [W.subset(p) for p in parts]


def diameter(U: NodeSet) -> float:
    if U.s < 2:
        return 0.0
    return float(pairwise_distances(U).max())


def set_distance(U: NodeSet, V: NodeSet) -> float:
    if U.s == 0 or V.s == 0:
        raise NodeSetError("Distance between sets needs two non-empty sets")
    return float(_torus_abs(U.array[:, None] - V.array[None, :]).min())


def partition_by_gap(X: NodeSet, gap: float) -> List[NodeSet]:
    """Cut the circle at every consecutive gap larger than `gap` (single-linkage clumps)"""
    if X.s == 0:
        return []
    if X.s == 1:
        return [X]
    pts = X.array
    gaps = np.append(np.diff(pts), 1.0 - pts[-1] + pts[0])
    cuts = np.flatnonzero(gaps > gap)
    if cuts.size == 0:
        return [X]

    clumps: List[NodeSet] = []
    start = (cuts[0] + 1) % X.s
    current: List[int] = []
    for step in range(X.s):
        i = (start + step) % X.s
        current.append(i)
        if gaps[i] > gap:
            clumps.append(X.subset(current))
            current = []
    return clumps


def validate_clumps(X: NodeSet, partition: Sequence[NodeSet], delta: float) -> ClumpsParams:
    """Check the clump axioms for a proposed partition and measure its parameters"""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if any(c.s == 0 for c in partition):
        raise ClumpValidationError("cover", "clumps must be non-empty")

    used = np.zeros(X.s, dtype=int)
    for clump in partition:
        for p in clump:
            d = distances_to(p, X)
            idx = int(np.argmin(d))
            if d[idx] > NUMERICS.geom_tol:
                raise ClumpValidationError("cover", f"clump point {p} is not a node")
            used[idx] += 1
    if np.any(used != 1):
        raise ClumpValidationError("cover", "clumps must cover every node exactly once")

    if X.s >= 2 and min_separation(X) < delta - NUMERICS.geom_tol:
        raise ClumpValidationError(
            "separation", f"minimum separation {min_separation(X):.6g} is below delta={delta:.6g}")

    lam = max(c.s for c in partition)
    alpha = max(diameter(c) for c in partition)
    r = len(partition)

    beta = gap = None
    if r >= 2:
        gap = min(set_distance(partition[j], partition[k])
                  for j in range(r) for k in range(j + 1, r))
        # largest beta with dist > beta under the closed-distance convention
        beta = gap - 2 * NUMERICS.geom_tol
        if not beta > alpha:
            raise ClumpValidationError(
                "gap", f"clump gap {gap:.6g} does not exceed clump diameter {alpha:.6g}")

    return ClumpsParams(nodes=X, s=X.s, delta=delta, r=r, lam=lam, alpha=alpha,
                        partition=tuple(partition), beta=beta, gap=gap)
