"""
Closed-form singular value bounds for non-harmonic Fourier matrices.

Every lower-bound evaluator returns a BoundReport; when a theorem hypothesis
fails the report is marked inapplicable with the failed hypothesis as reason,
so callers sweeping over tau can skip it. Per-node terms are carried in log
space and combined with logsumexp, since they decay like (m delta)^(lambda-1).
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from config.settings import NUMERICS, BoundMethod
from models.errors import BoundInvariantError, InapplicableHypothesisError
from models.fourier_models import BoundReport, ClumpsParams, NodeRecord, NodeSet
from services.torus_geometry import (
    density_criterion,
    distances_to,
    local_sparsity,
    min_separation,
    neighborhood_split,
)

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


def robust_floor(t: float) -> int:
    """floor(t) that does not drop an exact integer computed with round-off"""
    return math.floor(t + NUMERICS.floor_tol)


def robust_ceil(t: float) -> int:
    return math.ceil(t - NUMERICS.floor_tol)


def phi(t: float) -> float:
    """t / floor(t), the integer rounding correction, for t >= 1"""
    if t < 1.0 - NUMERICS.floor_tol:
        raise ValueError(f"phi is defined for t >= 1, got {t}")
    return max(1.0, t / robust_floor(t))


def psi(t: float) -> float:
    """sin(pi t) / (pi t) restricted to |t| <= 1/2"""
    if abs(t) > 0.5 + NUMERICS.geom_tol:
        raise ValueError(f"psi is defined on [-1/2, 1/2], got {t}")
    return float(np.sinc(t))


def _log_product(factors) -> float:
    factors = np.asarray(factors, dtype=float)
    if factors.size == 0:
        return 0.0
    if factors.size <= NUMERICS.log_space_threshold:
        prod = float(np.prod(factors))
        if 0.0 < prod < math.inf:
            return math.log(prod)
    return float(np.sum(np.log(factors)))


@dataclass
class _NodeGeometry:
    k: int
    r_k: int
    nu_g: int
    n_k: int
    near: np.ndarray  # torus distances from x_k to the other bad-set points
    good_size: int


def _node_geometry(m: int, tau: float, X: NodeSet) -> List[_NodeGeometry]:
    nodes = []
    for k, x_k in enumerate(X):
        bad, good = neighborhood_split(x_k, tau, X)
        d = distances_to(x_k, X)
        mask = d <= tau + NUMERICS.geom_tol
        mask[k] = False
        nu_g = local_sparsity(tau, good)
        n_k = robust_floor(m - 2 * nu_g / tau)
        if n_k < m // 3:
            raise BoundInvariantError(f"n_{k}={n_k} fell below floor(m/3)={m // 3}")
        if mask.sum() + good.s != X.s - 1:
            raise BoundInvariantError(f"Bad and good sets at node {k} do not partition X")
        nodes.append(_NodeGeometry(k=k, r_k=bad.s, nu_g=nu_g, n_k=n_k,
                                   near=np.sort(d[mask]), good_size=good.s))
    return nodes


def _theorem_hypotheses(m: int, tau: float, X: NodeSet) -> Optional[str]:
    if not (0.0 < tau <= 0.5):
        raise ValueError(f"tau must lie in (0, 1/2], got {tau}")
    if X.s < 2:
        return "s >= 2"
    if m < 6 * X.s:
        return f"m >= 6s (m={m}, s={X.s})"
    if not density_criterion(m, tau, X):
        return f"(m, tau) density criterion 3*nu/tau <= m (nu={local_sparsity(tau, X)}, tau={tau:.6g})"
    return None


def well_separated_bounds(m: int, X: NodeSet) -> Tuple[float, float]:
    """(sqrt(m - 1/Delta), sqrt(m + 1/Delta)), bracketing sigma_s and sigma_1 when Delta > 1/m"""
    delta = min_separation(X)
    if not m * delta > 1.0:
        raise InapplicableHypothesisError(
            "Delta(X) > 1/m", f"minimum separation {delta:.6g} does not exceed 1/m={1.0 / m:.6g}")
    return math.sqrt(m - 1.0 / delta), math.sqrt(m + 1.0 / delta)


def well_separated_lower_report(m: int, X: NodeSet) -> BoundReport:
    method = BoundMethod.WELL_SEPARATED_LOWER
    if X.s < 2:
        return BoundReport.inapplicable(method, m, "s >= 2")
    try:
        lower, _ = well_separated_bounds(m, X)
    except InapplicableHypothesisError as e:
        return BoundReport.inapplicable(method, m, e.hypothesis)
    return BoundReport(method=method, m=m, value=lower, delta=min_separation(X))


THEOREM1_VARIANTS = {
    "Eq1": BoundMethod.MAIN1,
    "Eq1Reference": BoundMethod.MAIN1_REFERENCE,
    "Eq2": BoundMethod.MAIN2,
}


def theorem1_bound(m: int, tau: float, X: NodeSet, variant: str = "Eq1") -> BoundReport:
    """
    Lower bound on sigma_s from the local sparsity of X.

    Eq1 sums the per-node terms 2^nu_k * 2a/(1-2a) * prod_J phi(1/(2d))^2 * prod_I a^2/((1-2a) d)^2
    and returns their reciprocal square root; Eq2 is the simplified min over nodes.

    Eq1Reference is Eq1 with the phi product taken once instead of squared. It is
    the curve the published inaccuracy factors were computed from (21.0 for the
    motivational set at m=400, 66.1 for colliding clumps at beta=0.1, m=100) and is
    kept for reproducing them; it is not a certified bound.
    """
    if variant not in THEOREM1_VARIANTS:
        raise ValueError(f"Unknown theorem1 variant {variant!r}")
    method = THEOREM1_VARIANTS[variant]
    reason = _theorem_hypotheses(m, tau, X)
    if reason:
        return BoundReport.inapplicable(method, m, reason, tau=tau)

    s = X.s
    records: List[NodeRecord] = []
    for node in _node_geometry(m, tau, X):
        alpha = node.r_k / (2 * m - 4 * node.nu_g / tau)
        if alpha > tau / 2 + NUMERICS.geom_tol:
            raise BoundInvariantError(f"alpha_{node.k}={alpha:.6g} exceeds tau/2={tau / 2:.6g}")
        in_I = node.near <= alpha + NUMERICS.geom_tol
        d_I, d_J = node.near[in_I], node.near[~in_I]

        if variant == "Eq2":
            log_term = (-0.5 * math.log(4 * s * alpha) - 0.5 * node.nu_g * LN2
                        - d_J.size * LN2 + _log_product(d_I / (2 * alpha)))
        else:
            phi_power = 2 if variant == "Eq1" else 1
            log_term = (node.nu_g * LN2 + math.log(2 * alpha / (1 - 2 * alpha))
                        + phi_power * _log_product([phi(1.0 / (2 * d)) for d in d_J])
                        + 2 * _log_product(alpha / ((1 - 2 * alpha) * d_I)))

        records.append(NodeRecord(k=node.k, r_k=node.r_k, n_k=node.n_k, nu_Gk=node.nu_g,
                                  I_size=int(d_I.size), J_size=int(d_J.size),
                                  term_k=math.exp(log_term) if log_term < 700 else math.inf,
                                  log_term_k=log_term, alpha_k=alpha))

    logs = np.array([rec.log_term_k for rec in records])
    log_value = float(logs.min()) if variant == "Eq2" else float(-0.5 * logsumexp(logs))
    logger.debug(f"theorem1 {variant} m={m} tau={tau:.6g}: log value {log_value:.6f}")
    return BoundReport.from_log(method, m, log_value, tau=tau, per_node=records)


def default_delta(m: int, X: NodeSet) -> float:
    """Measured minimum separation clipped to (0, 1/m]"""
    return min(min_separation(X), 1.0 / m)


def theorem2_bound(m: int, tau: float, delta: Optional[float], X: NodeSet,
                   variant: str = "Eq3") -> BoundReport:
    """Lower bound on sigma_s in terms of local sparsity and a separation parameter delta <= 1/m"""
    if variant not in ("Eq3", "Eq4"):
        raise ValueError(f"Unknown theorem2 variant {variant!r}")
    method = BoundMethod.THM2_EQ3 if variant == "Eq3" else BoundMethod.THM2_EQ4
    reason = _theorem_hypotheses(m, tau, X)
    if reason:
        return BoundReport.inapplicable(method, m, reason, tau=tau, delta=delta)
    if delta is None:
        delta = default_delta(m, X)
    if not (0.0 < delta <= (1.0 + NUMERICS.geom_tol) / m):
        return BoundReport.inapplicable(method, m, f"delta in (0, 1/m] (delta={delta:.6g})",
                                        tau=tau, delta=delta)
    if min_separation(X) < delta - NUMERICS.geom_tol:
        return BoundReport.inapplicable(
            method, m, f"Delta(X) >= delta (Delta={min_separation(X):.6g}, delta={delta:.6g})",
            tau=tau, delta=delta)

    s = X.s
    records: List[NodeRecord] = []
    for node in _node_geometry(m, tau, X):
        r, n, nu = node.r_k, node.n_k, node.nu_g
        in_I = node.near <= r / (2 * n) + NUMERICS.geom_tol
        if variant == "Eq3":
            ph = phi(n / r)
            log_term = (math.log(4 * math.e ** 2 / math.pi ** 2) + nu * LN2
                        + math.log(ph / (r * n))
                        + (2 * r - 2) * (math.log(2 * math.e * ph)
                                         - math.log(math.sin(math.pi * n * delta / 2))))
        else:
            log_term = (math.log(math.pi / (2 * math.e)) + 0.5 * math.log(m / (6 * s))
                        + 0.5 * (math.log(r) - nu * LN2)
                        + (r - 1) * math.log(m * delta / (12 * math.e)))
        records.append(NodeRecord(k=node.k, r_k=r, n_k=n, nu_Gk=nu,
                                  I_size=int(in_I.sum()), J_size=int((~in_I).sum()),
                                  term_k=math.exp(log_term) if log_term < 700 else math.inf,
                                  log_term_k=log_term))

    logs = np.array([rec.log_term_k for rec in records])
    log_value = float(-0.5 * logsumexp(logs)) if variant == "Eq3" else float(logs.min())
    return BoundReport.from_log(method, m, log_value, tau=tau, delta=delta, per_node=records)


def clumps_corollary_bound(m: int, params: ClumpsParams) -> BoundReport:
    """(pi/2e) sqrt(m/12s) (m delta / (12 sqrt2 e))^(lambda-1) for nodes made of separated clumps"""
    method = BoundMethod.CLUMPS_COROLLARY
    s, lam, delta = params.s, params.lam, params.delta
    if s < 2:
        return BoundReport.inapplicable(method, m, "s >= 2", delta=delta)
    if m < 6 * s:
        return BoundReport.inapplicable(method, m, f"m >= 6s (m={m}, s={s})", delta=delta)
    if delta > (1.0 + NUMERICS.geom_tol) / m:
        return BoundReport.inapplicable(method, m, f"delta <= 1/m (delta={delta:.6g})", delta=delta)
    if params.r > 1 and params.beta * m < 3 * lam:
        return BoundReport.inapplicable(
            method, m, f"beta >= 3*lambda/m (beta={params.beta:.6g}, lambda={lam})", delta=delta)

    tau = 0.5 if params.r == 1 else min(params.beta, 0.5)
    if not density_criterion(m, tau, params.nodes):
        raise BoundInvariantError(f"Clump parameters admit tau={tau:.6g} but the density criterion fails")

    log_value = (math.log(math.pi / (2 * math.e)) + 0.5 * math.log(m / (12 * s))
                 + (lam - 1) * math.log(m * delta / (12 * math.sqrt(2) * math.e)))
    return BoundReport.from_log(method, m, log_value, tau=tau, delta=delta)


def gautschi_bazan_bound(m: int, X: NodeSet) -> BoundReport:
    """sqrt(floor(m/s)/s) * min_k prod_{j != k} |e^{2 pi i x_j} - e^{2 pi i x_k}| / 2"""
    method = BoundMethod.GAUTSCHI_BAZAN
    s = X.s
    if s == 0 or m < s:
        return BoundReport.inapplicable(method, m, f"m >= s (m={m}, s={s})")
    pts = X.array
    log_prod = []
    for k in range(s):
        d = distances_to(pts[k], X)
        d = np.delete(d, k)
        # |e^{2 pi i a} - e^{2 pi i b}| / 2 = sin(pi |a - b|_T)
        log_prod.append(float(np.sum(np.log(np.sin(np.pi * d)))))
    log_value = 0.5 * math.log((m // s) / s) + min(log_prod)
    return BoundReport.from_log(method, m, log_value)


def sigma1_upper_bound(m: int, tau: float, X: NodeSet) -> BoundReport:
    """sqrt(nu(tau, X) (m + 1/tau)), an upper bound on sigma_1 when m > 1/tau"""
    method = BoundMethod.SIGMA1_UPPER
    if not (0.0 < tau <= 0.5):
        raise ValueError(f"tau must lie in (0, 1/2], got {tau}")
    if X.s == 0 or m < X.s:
        return BoundReport.inapplicable(method, m, f"m >= s (m={m}, s={X.s})", tau=tau)
    if not m * tau > 1.0:
        return BoundReport.inapplicable(method, m, f"m > 1/tau (m={m}, tau={tau:.6g})", tau=tau)
    value = math.sqrt(local_sparsity(tau, X) * (m + 1.0 / tau))
    return BoundReport(method=method, m=m, value=value, tau=tau)


def spike_train_bound(m: int, s: int, eps: float, simplified: bool = False) -> float:
    """Second-theorem bound for eps * {0, 1/m, ..., (s-1)/m} with tau = 1/2 and delta = eps/m"""
    base = math.sin(math.pi * eps / 2)
    if simplified:
        return math.pi / (2 * math.e) * math.sqrt(5 * m / 6) * (5 * base / (12 * math.e)) ** (s - 1)
    ph = phi(m / s)
    return math.pi / (2 * math.e) * math.sqrt(m / ph) * (base / (2 * math.e * ph)) ** (s - 1)


def spike_train_slope(eps: float) -> float:
    """Exact slope in s of the log of the simplified spike-train bound"""
    return math.log(5 * math.sin(math.pi * eps / 2) / (12 * math.e))


def barnett_reference_upper(s: int, eps: float, C: float = 500.0) -> float:
    """Reference-only upper curve C exp(-pi (1-eps) s / 2); not certified"""
    return C * math.exp(-math.pi * (1 - eps) * s / 2)


def barnett_small_eps_reference(m: int, s: int, eps: float) -> float:
    """Reference-only small-eps upper curve; meaningful while e pi (m-1) eps / (4m) < 1"""
    ratio = math.e * math.pi * (m - 1) * eps / (4 * m)
    if ratio >= 1.0:
        return math.inf
    return 2 * math.sqrt(m * s) / (1 - ratio) * ratio ** (s - 1)
