import logging
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from config.settings import NUMERICS, SWEEP_METHODS, BadSetVariant, BoundMethod, RuntimeConfig
from models.errors import InapplicableHypothesisError, NoAdmissibleTauError
from models.fourier_models import BoundReport, ClumpsParams, NodeSet, SweepCandidate, SweepResult
from services.bounds_service import (
    clumps_corollary_bound,
    gautschi_bazan_bound,
    sigma1_upper_bound,
    theorem1_bound,
    theorem2_bound,
    well_separated_lower_report,
)
from services.interpolation_service import constructive_bound
from services.torus_geometry import density_criterion, local_sparsity, pairwise_distances
from utils.parallel_helper import parallel_map

logger = logging.getLogger(__name__)


def candidate_taus(X: NodeSet) -> List[float]:
    """Pairwise distances nudged just past each breakpoint of nu(tau, X), plus 1/2"""
    if X.s < 2:
        raise ValueError("Candidate taus need at least two nodes")
    D = pairwise_distances(X)
    dists = np.sort(D[np.triu_indices(X.s, k=1)])
    taus = []
    for d in dists:
        tau = min(float(d) + NUMERICS.geom_tol, 0.5)
        if not taus or tau - taus[-1] > NUMERICS.geom_tol:
            taus.append(tau)
    if taus[-1] < 0.5:
        taus.append(0.5)
    return taus


def dense_tau_grid(n: int) -> List[float]:
    """n equispaced taus in (0, 1/2]"""
    if n < 1:
        raise ValueError(f"Grid size must be positive, got {n}")
    return [0.5 * (i + 1) / n for i in range(n)]


def admissible_taus(m: int, X: NodeSet, T: Sequence[float]) -> List[float]:
    for tau in T:
        if not (0.0 < tau <= 0.5):
            raise ValueError(f"tau must lie in (0, 1/2], got {tau}")
    return [tau for tau in T if density_criterion(m, tau, X)]


def sparsity_profile(X: NodeSet) -> pd.DataFrame:
    """nu(tau, X) at every breakpoint, starting below the smallest pairwise distance"""
    if X.s < 2:
        return pd.DataFrame({'tau': [0.5], 'nu': [X.s]})
    taus = candidate_taus(X)
    taus = [0.5 * (taus[0] - NUMERICS.geom_tol)] + taus
    return pd.DataFrame({'tau': taus, 'nu': [local_sparsity(t, X) for t in taus]})


def evaluate_bound(method: BoundMethod, m: int, X: NodeSet, tau: Optional[float] = None,
                   delta: Optional[float] = None,
                   clumps: Optional[ClumpsParams] = None) -> BoundReport:
    """Dispatch a single bound evaluation by method"""
    if method == BoundMethod.MAIN1:
        return theorem1_bound(m, tau, X, "Eq1")
    if method == BoundMethod.MAIN1_REFERENCE:
        return theorem1_bound(m, tau, X, "Eq1Reference")
    if method == BoundMethod.MAIN2:
        return theorem1_bound(m, tau, X, "Eq2")
    if method in (BoundMethod.THM2_EQ3, BoundMethod.THM2_EQ4):
        return theorem2_bound(m, tau, delta, X, "Eq3" if method == BoundMethod.THM2_EQ3 else "Eq4")
    if method == BoundMethod.CONSTRUCTIVE:
        # an explicit delta selects the separated bad-set construction
        variant = BadSetVariant.GENERAL if delta is None else BadSetVariant.SEPARATED
        return constructive_bound(m, tau, X, variant, delta)
    if method == BoundMethod.CLUMPS_COROLLARY:
        if clumps is None:
            raise ValueError("ClumpsCorollary needs validated clump parameters")
        return clumps_corollary_bound(m, clumps)
    if method == BoundMethod.GAUTSCHI_BAZAN:
        return gautschi_bazan_bound(m, X)
    if method == BoundMethod.WELL_SEPARATED_LOWER:
        return well_separated_lower_report(m, X)
    if method == BoundMethod.SIGMA1_UPPER:
        return sigma1_upper_bound(m, tau, X)
    raise ValueError(f"Unsupported bound method {method}")


def select_best(candidates: Sequence[SweepCandidate]) -> SweepCandidate:
    """Largest bound, compared in log space so underflowed values still rank; ties go to the smaller tau"""
    return min(candidates, key=lambda c: (-c.log_value, c.tau))


class TauSweepStrategy:
    """Pick the tau that maximizes a lower bound over a finite candidate collection"""

    def __init__(self, runtime_config: Optional[RuntimeConfig] = None):
        self.runtime_config = runtime_config or RuntimeConfig(threads=1)

    def best_bound(self, m: int, X: NodeSet, T: Optional[Sequence[float]] = None,
                   method: BoundMethod = BoundMethod.MAIN1,
                   delta: Optional[float] = None) -> SweepResult:
        if method not in SWEEP_METHODS:
            raise ValueError(f"{method.value} does not depend on tau and cannot be swept")
        if X.s < 2:
            raise InapplicableHypothesisError("s >= 2")
        T = list(candidate_taus(X) if T is None else T)
        admissible = set(admissible_taus(m, X, T))

        def evaluate(tau: float) -> SweepCandidate:
            if tau not in admissible:
                return SweepCandidate(tau=tau, applicable=False)
            report = evaluate_bound(method, m, X, tau, delta)
            if not report.applicable:
                return SweepCandidate(tau=tau, applicable=False, report=report)
            return SweepCandidate(tau=tau, applicable=True, value=report.value, report=report)

        candidates = parallel_map(evaluate, T, self.runtime_config.threads)
        applicable = [c for c in candidates if c.applicable]
        if not applicable:
            raise NoAdmissibleTauError(
                "admissible tau", f"No tau in the candidate set satisfies the hypotheses for m={m}; "
                                  f"include tau=1/2 and make sure m >= 6s")
        best = select_best(applicable)
        logger.info(f"{method.value} sweep over {len(T)} taus (m={m}): best {best.value:.6e} "
                    f"(log {best.log_value:.6f}) at tau={best.tau:.6g}")
        return SweepResult(method=method, m=m, candidates=candidates, best_tau=best.tau,
                           best_value=best.value, best_log_value=best.log_value)

    def tightest_upper_bound(self, m: int, X: NodeSet,
                             T: Optional[Sequence[float]] = None) -> BoundReport:
        """Smallest sigma_1 upper bound over the candidate taus"""
        T = list(candidate_taus(X) if T is None and X.s >= 2 else (T or [0.5]))
        reports = parallel_map(lambda tau: sigma1_upper_bound(m, tau, X), T, self.runtime_config.threads)
        applicable = [r for r in reports if r.applicable]
        if not applicable:
            raise NoAdmissibleTauError("m > 1/tau", f"No candidate tau satisfies m > 1/tau for m={m}")
        return min(applicable, key=lambda r: (r.log_value, r.tau))


def best_bound(m: int, X: NodeSet, T: Optional[Sequence[float]] = None,
               method: BoundMethod = BoundMethod.MAIN1,
               delta: Optional[float] = None) -> SweepResult:
    return TauSweepStrategy().best_bound(m, X, T, method, delta)
