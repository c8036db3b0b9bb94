import logging
import math
from typing import Tuple

import numpy as np
from scipy import linalg

from models.errors import InapplicableHypothesisError
from models.fourier_models import FourierMatrix, NodeSet, SingularData

logger = logging.getLogger(__name__)


def build(m: int, X: NodeSet) -> FourierMatrix:
    """The m x s matrix with entries e^{-2 pi i j x_k}, j = 0..m-1"""
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    j = np.arange(m)[:, None]
    entries = np.exp(-2j * np.pi * j * X.array[None, :])
    entries.setflags(write=False)
    return FourierMatrix(m=m, nodes=X, entries=entries)


def _require_tall(m: int, X: NodeSet):
    if X.s == 0:
        raise ValueError("The Fourier matrix of an empty node set has no columns")
    if m < X.s:
        raise InapplicableHypothesisError("m >= s", f"m={m} is smaller than s={X.s}; sigma_s vanishes")


def _fix_phase(v: np.ndarray, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # largest-modulus entry of v real and nonnegative; u rotates with it so Phi v = sigma u holds
    k = int(np.argmax(np.abs(v)))
    phase = np.conj(v[k]) / abs(v[k])
    return v * phase, u * phase


def extreme_singular_values(m: int, X: NodeSet) -> SingularData:
    """Oracle for sigma_1 and sigma_s of Phi(m, X) from a thin SVD of Phi itself"""
    _require_tall(m, X)
    Phi = build(m, X).entries
    U, S, Vh = linalg.svd(Phi, full_matrices=False, lapack_driver='gesvd')
    v_min, u_min = _fix_phase(Vh[-1].conj(), U[:, -1])
    logger.debug(f"Oracle m={m}, s={X.s}: sigma_1={S[0]:.6e}, sigma_s={S[-1]:.6e}")
    return SingularData(sigma_1=float(S[0]), sigma_s=float(S[-1]), v_min=v_min, u_min=u_min)


def dirichlet_gram_entry(m: int, t: float) -> complex:
    """D_m(t) = sum_{k<m} e^{2 pi i k t}"""
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    return complex(np.exp(2j * np.pi * np.arange(m) * t).sum())


def gram_matrix(m: int, X: NodeSet) -> np.ndarray:
    """Phi* Phi assembled entrywise as D_m(x_j - x_k)"""
    pts = X.array
    G = np.empty((X.s, X.s), dtype=complex)
    for a in range(X.s):
        for b in range(X.s):
            G[a, b] = dirichlet_gram_entry(m, pts[a] - pts[b])
    return G


def gram_singular_values(m: int, X: NodeSet) -> np.ndarray:
    """
    Singular values of Phi(m, X) in descending order via the Hermitian Gram matrix.

    Cross-check path only: squaring loses relative accuracy once sigma_s**2 drops
    near machine precision times m*s.
    """
    _require_tall(m, X)
    Phi = build(m, X).entries
    eigvals = linalg.eigh(Phi.conj().T @ Phi, eigvals_only=True)
    return np.sqrt(np.clip(eigvals[::-1], 0.0, None))


def condition_number(m: int, X: NodeSet) -> float:
    return extreme_singular_values(m, X).condition_number


def frobenius_upper(m: int, s: int) -> float:
    return math.sqrt(m * s)
