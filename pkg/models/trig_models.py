from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np

from models.fourier_models import NodeSet


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """Trigonometric polynomial sum_k coeffs[k] e^{2 pi i k x}, frequencies 0..deg"""
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("TrigPoly needs a non-empty 1-d coefficient vector")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, 'coeffs', c)

    @property
    def deg(self) -> int:
        return self.coeffs.size - 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            'deg': self.deg,
            'coeffs': [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrigPoly":
        coeffs = np.array([complex(re, im) for re, im in data['coeffs']])
        if coeffs.size != int(data['deg']) + 1:
            raise ValueError("TrigPoly degree does not match coefficient count")
        return cls(coeffs)


@dataclass(frozen=True)
class LagrangeFamily:
    polys: Tuple[TrigPoly, ...]
    nodes: NodeSet
    budget_m: int
    tau: float

    def __post_init__(self):
        if len(self.polys) != self.nodes.s:
            raise ValueError("A Lagrange family needs one polynomial per node")

    def degrees(self) -> List[int]:
        return [f.deg for f in self.polys]
