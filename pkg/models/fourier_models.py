import math
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple

import numpy as np

from config.settings import NUMERICS, BoundMethod
from models.errors import NodeSetError

# exp overflows past this
LOG_FLOAT_MAX = math.log(sys.float_info.max)


def wrap(x: float) -> float:
    """Canonical representative of x on the torus [0, 1)"""
    x = float(x)
    if not math.isfinite(x):
        raise NodeSetError(f"Cannot wrap non-finite value {x!r}")
    w = x % 1.0
    # tiny negative inputs round up to exactly 1.0
    return 0.0 if w >= 1.0 else w


@dataclass(frozen=True)
class NodeSet:
    """Sorted, distinct points on the torus [0, 1)"""
    points: Tuple[float, ...] = ()

    def __post_init__(self):
        pts = sorted(float(p) for p in self.points)
        for p in pts:
            if not math.isfinite(p) or p < 0.0 or p >= 1.0:
                raise NodeSetError(f"Node {p!r} is not a canonical torus point")
        if len(pts) >= 2:
            gaps = np.diff(pts)
            wrap_gap = 1.0 - pts[-1] + pts[0]
            if gaps.min() <= NUMERICS.dedup_tol or wrap_gap <= NUMERICS.dedup_tol:
                raise NodeSetError("Degenerate node set: two points coincide on the torus")
        object.__setattr__(self, 'points', tuple(pts))

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "NodeSet":
        """Canonicalize arbitrary reals onto the torus and build a node set"""
        return cls(tuple(wrap(v) for v in values))

    @property
    def s(self) -> int:
        return len(self.points)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    def shifted(self, t: float) -> "NodeSet":
        return NodeSet.from_values(p - t for p in self.points)

    def subset(self, indices: Iterable[int]) -> "NodeSet":
        return NodeSet(tuple(self.points[i] for i in indices))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[float]:
        return iter(self.points)

    def __getitem__(self, index: int) -> float:
        return self.points[index]


@dataclass(frozen=True)
class ClumpsParams:
    nodes: NodeSet
    s: int
    delta: float
    r: int
    lam: int
    alpha: float
    partition: Tuple[NodeSet, ...]
    beta: Optional[float] = None  # absent for a single clump
    gap: Optional[float] = None   # measured min inter-clump distance


@dataclass(frozen=True)
class FourierMatrix:
    m: int
    nodes: NodeSet
    entries: np.ndarray = field(repr=False)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape


@dataclass(frozen=True)
class SingularData:
    sigma_1: float
    sigma_s: float
    v_min: np.ndarray = field(repr=False)
    u_min: np.ndarray = field(repr=False)

    @property
    def condition_number(self) -> float:
        return self.sigma_1 / self.sigma_s

    def to_dict(self) -> Dict[str, float]:
        return {
            'sigma_1': self.sigma_1,
            'sigma_s': self.sigma_s,
            'condition_number': self.condition_number,
        }


@dataclass
class NodeRecord:
    """Per-node bookkeeping of a bound evaluation"""
    k: int
    r_k: int
    n_k: int
    nu_Gk: int
    I_size: int
    J_size: int
    term_k: float
    log_term_k: float
    alpha_k: Optional[float] = None


@dataclass
class BoundReport:
    """
    One bound evaluation. log_value is authoritative: value = exp(log_value) can
    underflow to 0.0 for tightly clustered nodes, in which case `underflow` is set
    and callers compare reports through log_value.
    """
    method: BoundMethod
    m: int
    value: Optional[float] = None
    tau: Optional[float] = None
    delta: Optional[float] = None
    applicable: bool = True
    reason: Optional[str] = None
    per_node: List[NodeRecord] = field(default_factory=list)
    log_value: Optional[float] = None
    underflow: bool = False

    def __post_init__(self):
        if not self.applicable:
            return
        if self.value is None or math.isnan(self.value) or self.value < 0:
            raise ValueError(f"{self.method.value}: applicable bound must be non-negative, got {self.value}")
        if self.log_value is None:
            if self.value == 0.0:
                raise ValueError(f"{self.method.value}: a zero bound needs its log_value")
            self.log_value = math.log(self.value)
        if self.value < sys.float_info.min:
            self.underflow = True

    @classmethod
    def from_log(cls, method: BoundMethod, m: int, log_value: float, **kwargs) -> "BoundReport":
        """Report exp(log_value), keeping log_value when the exponential underflows"""
        if math.isnan(log_value) or log_value == math.inf:
            raise ValueError(f"{method.value}: log bound must be finite or -inf, got {log_value}")
        value = math.exp(log_value) if log_value < LOG_FLOAT_MAX else math.inf
        return cls(method=method, m=m, value=value, log_value=log_value, **kwargs)

    @classmethod
    def inapplicable(cls, method: BoundMethod, m: int, reason: str,
                     tau: Optional[float] = None, delta: Optional[float] = None) -> "BoundReport":
        return cls(method=method, m=m, tau=tau, delta=delta, applicable=False, reason=reason)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'method': self.method.value,
            'm': self.m,
            'tau': self.tau,
            'delta': self.delta,
            'value': self.value,
            'log_value': self.log_value,
            'underflow': self.underflow,
            'applicable': self.applicable,
            'reason': self.reason,
            'per_node': [vars(rec).copy() for rec in self.per_node],
        }

    def csv_row(self) -> Dict[str, Any]:
        return {'method': self.method.value, 'm': self.m, 'tau': self.tau,
                'delta': self.delta, 'value': self.value, 'log_value': self.log_value}


@dataclass
class SweepCandidate:
    tau: float
    applicable: bool
    value: Optional[float] = None
    report: Optional[BoundReport] = None

    @property
    def log_value(self) -> float:
        return self.report.log_value if self.applicable else -math.inf


@dataclass
class SweepResult:
    method: BoundMethod
    m: int
    candidates: List[SweepCandidate]
    best_tau: float
    best_value: float
    best_log_value: Optional[float] = None

    @property
    def best_report(self) -> Optional[BoundReport]:
        for cand in self.candidates:
            if cand.tau == self.best_tau:
                return cand.report
        return None
