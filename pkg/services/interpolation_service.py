"""
Trigonometric interpolants that certify lower bounds on sigma_s.

A family of Lagrange interpolants f_k (f_k(x_l) = delta_kl, degree < m) gives
sigma_s(Phi(m, X)) >= 1 / sqrt(sum_k ||f_k||^2). Each f_k is assembled as the
product of a bad-set factor (dilated interpolant vanishing on the nodes near
x_k) and a good-set factor (product of minimum-norm interpolants over a
sparsity decomposition of the far nodes).
"""
import logging
import math
from typing import Iterable, Optional, Tuple

import numpy as np
from scipy import linalg

from config.settings import NUMERICS, BadSetVariant, BoundMethod
from models.errors import BoundInvariantError, InapplicableHypothesisError
from models.fourier_models import BoundReport, NodeSet
from models.trig_models import LagrangeFamily, TrigPoly
from services.bounds_service import default_delta, psi, robust_ceil, robust_floor
from services.fourier_matrix import build, extreme_singular_values
from services.torus_geometry import (
    density_criterion,
    distances_to,
    local_sparsity,
    min_separation,
    neighborhood_split,
    sparsity_decomposition,
)
from services.trig_poly import constant, dirichlet, evaluate, l2_norm, multiply, shift

logger = logging.getLogger(__name__)


def _product(polys: Iterable[TrigPoly]) -> TrigPoly:
    result = constant(1.0)
    for p in polys:
        result = multiply(result, p)
    return result


def _dilated_factor(q: int, w: float) -> TrigPoly:
    """(e^{2 pi i q x} - e^{2 pi i q w}) / (1 - e^{2 pi i q w}): one at 0, zero at w"""
    z = np.exp(2j * np.pi * q * w)
    coeffs = np.zeros(q + 1, dtype=complex)
    coeffs[0] = -z / (1 - z)
    coeffs[q] = 1 / (1 - z)
    return TrigPoly(coeffs)


def kronecker_residual(f: TrigPoly, X: NodeSet, k: int) -> float:
    """max_l |f(x_l) - delta_kl|"""
    target = np.zeros(X.s)
    target[k] = 1.0
    return float(np.max(np.abs(evaluate(f, X.array) - target)))


def _check_residual(f: TrigPoly, X: NodeSet, k: int, label: str):
    residual = kronecker_residual(f, X, k)
    if residual > NUMERICS.interp_tol:
        logger.error(f"{label}: interpolation residual {residual:.3e} exceeds {NUMERICS.interp_tol:.0e}")
        raise BoundInvariantError(
            f"{label} misses the Kronecker conditions by {residual:.3e} (tolerance {NUMERICS.interp_tol:.0e})")


def _split_at_origin(B: NodeSet) -> np.ndarray:
    """Points of B other than 0; B must contain 0"""
    d = distances_to(0.0, B)
    zero = int(np.argmin(d))
    if d[zero] > NUMERICS.geom_tol:
        raise InapplicableHypothesisError("0 in B", "bad-set interpolants need 0 among the nodes")
    return np.delete(B.array, zero)


# Minimum-norm interpolation

def min_norm_interpolant(m: int, X: NodeSet, w) -> TrigPoly:
    """Least-L2 polynomial of degree < m with f(x_k) = w_k, from the SVD of Phi(m, X)"""
    if m < X.s:
        raise InapplicableHypothesisError("m >= s", f"m={m} is smaller than s={X.s}")
    w = np.asarray(w, dtype=complex)
    if w.shape != (X.s,):
        raise ValueError(f"Expected {X.s} interpolation values, got shape {w.shape}")
    U, S, Vh = linalg.svd(build(m, X).entries, full_matrices=False)
    # Phi* c = w has minimal-norm solution c = U diag(1/S) V* w
    return TrigPoly(U @ ((Vh @ w) / S))


def min_norm_bounds(m: int, X: NodeSet, w) -> Tuple[float, float]:
    """Certified (L2, sup) bounds ||w|| / sigma_s and sqrt(m) ||w|| / sigma_s"""
    sigma_s = extreme_singular_values(m, X).sigma_s
    norm_w = float(np.linalg.norm(np.asarray(w, dtype=complex)))
    return norm_w / sigma_s, math.sqrt(m) * norm_w / sigma_s


def interpolation_operator_bound(m: int, X: NodeSet) -> float:
    """sqrt(m s) / sigma_s bounds the sup norm of the min-norm interpolant for unit-modulus data"""
    return math.sqrt(m * X.s) / extreme_singular_values(m, X).sigma_s


def min_norm_family(m: int, X: NodeSet) -> LagrangeFamily:
    """Minimum-norm Lagrange family; its duality value is the best a family can certify"""
    polys = tuple(min_norm_interpolant(m, X, np.eye(X.s)[k]) for k in range(X.s))
    return LagrangeFamily(polys=polys, nodes=X, budget_m=m, tau=0.5)


# Good sets

def good_set_bandwidth(tau: float) -> int:
    return robust_ceil(2.0 / tau)


def good_set_bounds(tau: float, nu: int) -> Tuple[float, float]:
    """(L2, sup) bounds for good_set_interpolant when the good set has local sparsity nu"""
    if nu == 0:
        return 1.0, 1.0
    m_g = good_set_bandwidth(tau)
    sup = (1.0 + 1.0 / (m_g * tau - 1.0)) ** (nu / 2)
    return sup / math.sqrt(m_g), sup


def good_set_zero_capacity(tau: float, r: int) -> int:
    """Largest good set that r separated parts can hold: r * floor(1/tau - 1)"""
    return r * robust_floor(1.0 / tau - 1.0)


def good_set_interpolant(tau: float, G: NodeSet, center: float) -> TrigPoly:
    """
    g(center) = 1 and g = 0 on G, with sup norm at most 2^(nu/2), nu = nu(tau, G).

    Every point of G must lie farther than tau from center.
    """
    if not (0.0 < tau <= 0.5):
        raise ValueError(f"tau must lie in (0, 1/2], got {tau}")
    if G.s == 0:
        return constant(1.0)
    if np.any(distances_to(center, G) <= tau + NUMERICS.geom_tol):
        raise InapplicableHypothesisError(
            "good set farther than tau from the centre",
            f"a point of G lies within tau={tau:.6g} of {center:.6g}")

    m_g = good_set_bandwidth(tau)
    parts = sparsity_decomposition(tau, G.shifted(center))
    factors = []
    for part in parts:
        nodes = NodeSet((0.0,) + part.points)
        w = np.zeros(nodes.s)
        w[0] = 1.0
        factors.append(min_norm_interpolant(m_g, nodes, w))
    g = shift(_product(factors), center)
    logger.debug(f"Good-set interpolant: {len(parts)} parts, m_g={m_g}, deg={g.deg}")
    return g


# Bad sets

def bad_general_l2_bound(n: int, r: int, B: NodeSet) -> float:
    q = n // r
    others = _split_at_origin(B)
    d = np.minimum(others, 1.0 - others)
    in_I = d <= r / (2 * n) + NUMERICS.geom_tol
    log_bound = -0.5 * math.log(q)
    for dist in d[~in_I]:
        log_bound -= math.log(2 * robust_floor(1.0 / (2 * dist)) * dist)
    for dist in d[in_I]:
        log_bound -= math.log(2 * q * dist)
    return math.exp(log_bound)


def bad_set_interpolant_general(n: int, r: int, B: NodeSet) -> TrigPoly:
    """
    f(0) = 1, f = 0 on B minus {0}, degree < n, for any B with |B| <= r <= n.

    Nodes within r/(2n) of 0 are cleared by factors dilated by q = floor(n/r) and
    averaged over q modulations; farther nodes w use the dilation floor(1/(2|w|)).
    """
    if not (1 <= B.s <= r <= n):
        raise InapplicableHypothesisError("|B| <= r <= n", f"|B|={B.s}, r={r}, n={n}")
    others = _split_at_origin(B)
    if others.size == 0:
        return dirichlet(n)

    q = n // r
    h_factors = [dirichlet(q)]
    g_factors = []
    for w in others:
        dist = min(w, 1.0 - w)
        if dist <= r / (2 * n) + NUMERICS.geom_tol:
            h_factors.append(_dilated_factor(q, w))
        else:
            g_factors.append(_dilated_factor(robust_floor(1.0 / (2 * dist)), w))
    return multiply(_product(g_factors), _product(h_factors))


def bad_separated_l2_bound(n: int, r: int, delta: float) -> float:
    q = n // r
    return (2 * math.e / (math.pi * r) / math.sqrt(q)
            * (4 * math.e / (math.pi * psi(n * delta / 2) * r * q * delta)) ** (r - 1))


def bad_set_interpolant_separated(n: int, r: int, delta: float, B: NodeSet) -> TrigPoly:
    """
    f(0) = 1, f = 0 on B minus {0}, degree < n, for |B| = r and delta <= Delta(B), delta <= 1/n.

    The k-th closest node is at least ceil(k/2) delta away, which sets its dilation.
    """
    if not (B.s == r <= n):
        raise InapplicableHypothesisError("|B| = r <= n", f"|B|={B.s}, r={r}, n={n}")
    if not (0.0 < delta <= (1.0 + NUMERICS.geom_tol) / n):
        raise InapplicableHypothesisError("delta in (0, 1/n]", f"delta={delta:.6g}, n={n}")
    if r >= 2 and min_separation(B) < delta - NUMERICS.geom_tol:
        raise InapplicableHypothesisError("Delta(B) >= delta", f"Delta(B)={min_separation(B):.6g}")
    others = _split_at_origin(B)
    if others.size == 0:
        return dirichlet(n)

    q = n // r
    dists = np.minimum(others, 1.0 - others)
    order = np.lexsort((others, dists))
    h_factors = [dirichlet(q)]
    g_factors = []
    for rank, idx in enumerate(order, start=1):
        w, dist = others[idx], dists[idx]
        steps = (rank + 1) // 2  # |a_k| for a = -1, 1, -2, 2, ...
        if dist <= r / (2 * n) + NUMERICS.geom_tol:
            h_factors.append(_dilated_factor(q, w))
        else:
            g_factors.append(_dilated_factor(max(1, robust_floor(q * steps * delta / dist)), w))
    return multiply(_product(g_factors), _product(h_factors))


# Lagrange families

def _family_hypotheses(m: int, tau: float, X: NodeSet):
    if X.s < 2:
        raise InapplicableHypothesisError("s >= 2")
    if m < 6 * X.s:
        raise InapplicableHypothesisError("m >= 6s", f"m={m}, s={X.s}")
    if not density_criterion(m, tau, X):
        raise InapplicableHypothesisError(
            "(m, tau) density criterion", f"3*nu/tau > m for nu={local_sparsity(tau, X)}, tau={tau:.6g}")


def lagrange_polynomial(m: int, tau: float, X: NodeSet, k: int,
                        variant: BadSetVariant = BadSetVariant.GENERAL,
                        delta: Optional[float] = None) -> TrigPoly:
    """f_k = b_k g_k: bad-set factor of degree < n_k times good-set factor of degree <= 2 nu_k / tau"""
    x_k = X[k]
    bad, good = neighborhood_split(x_k, tau, X)
    nu_g = local_sparsity(tau, good)
    n_k = robust_floor(m - 2 * nu_g / tau)
    local_bad = bad.shifted(x_k)
    if variant == BadSetVariant.GENERAL:
        b = bad_set_interpolant_general(n_k, bad.s, local_bad)
    else:
        b = bad_set_interpolant_separated(n_k, bad.s, delta, local_bad)
    f = multiply(shift(b, x_k), good_set_interpolant(tau, good, x_k))
    if f.deg > m - 1:
        raise BoundInvariantError(f"f_{k} has degree {f.deg} beyond the budget m-1={m - 1}")
    _check_residual(f, X, k, f"f_{k}")
    return f


def lagrange_family(m: int, tau: float, X: NodeSet,
                    variant: BadSetVariant = BadSetVariant.GENERAL,
                    delta: Optional[float] = None) -> LagrangeFamily:
    _family_hypotheses(m, tau, X)
    if variant == BadSetVariant.SEPARATED:
        if delta is None:
            delta = default_delta(m, X)
        if not (0.0 < delta <= (1.0 + NUMERICS.geom_tol) / m):
            raise InapplicableHypothesisError("delta in (0, 1/m]", f"delta={delta:.6g}")
        if min_separation(X) < delta - NUMERICS.geom_tol:
            raise InapplicableHypothesisError("Delta(X) >= delta", f"Delta(X)={min_separation(X):.6g}")
    polys = tuple(lagrange_polynomial(m, tau, X, k, variant, delta) for k in range(X.s))
    return LagrangeFamily(polys=polys, nodes=X, budget_m=m, tau=tau)


def duality_log_lower_bound(family: LagrangeFamily) -> float:
    return -0.5 * math.log(sum(l2_norm(f) ** 2 for f in family.polys))


def duality_lower_bound(family: LagrangeFamily) -> float:
    return math.exp(duality_log_lower_bound(family))


def constructive_bound(m: int, tau: float, X: NodeSet,
                       variant: BadSetVariant = BadSetVariant.GENERAL,
                       delta: Optional[float] = None) -> BoundReport:
    """Duality value of the explicitly constructed Lagrange family, as a bound report"""
    method = BoundMethod.CONSTRUCTIVE
    if variant == BadSetVariant.SEPARATED and delta is None and X.s >= 2:
        delta = default_delta(m, X)
    try:
        family = lagrange_family(m, tau, X, variant, delta)
    except InapplicableHypothesisError as e:
        return BoundReport.inapplicable(method, m, str(e), tau=tau, delta=delta)
    return BoundReport.from_log(method, m, duality_log_lower_bound(family), tau=tau, delta=delta)


def lagrange_benchmark_sup_bound(X: NodeSet, k: int) -> float:
    """prod_{j != k} 2 / |e^{2 pi i x_k} - e^{2 pi i x_j}| for the classical Lagrange polynomial"""
    d = np.delete(distances_to(X[k], X), k)
    return float(np.exp(-np.sum(np.log(np.sin(np.pi * d)))))
