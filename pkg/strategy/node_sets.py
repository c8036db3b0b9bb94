"""Reference node sets used by the experiments"""
from typing import List, Tuple

import numpy as np

from models.fourier_models import NodeSet


def motivational_clusters() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Three clusters of 4, 3 and 2 points around 0, 1/3 and 2/3 with spacings 1/90, 1/200, 1/500"""
    first = np.arange(4) / 90
    second = 1 / 3 + np.arange(3) / 200
    third = 2 / 3 + np.array([0.0, 1 / 500])
    return first, second, third


def motivational_nodes() -> NodeSet:
    return NodeSet.from_values(np.concatenate(motivational_clusters()))


def motivational_partition() -> List[NodeSet]:
    return [NodeSet.from_values(c) for c in motivational_clusters()]


def multiscale_nodes(eps: float) -> NodeSet:
    """The motivational clusters with every intra-cluster spacing scaled by eps"""
    first = eps * np.arange(4) / 90
    second = 1 / 3 + eps * np.arange(3) / 200
    third = 2 / 3 + eps * np.array([0.0, 1 / 500])
    return NodeSet.from_values(np.concatenate([first, second, third]))


def spike_train_nodes(s: int, eps: float, m: int) -> NodeSet:
    """eps * {0, 1/m, ..., (s-1)/m}"""
    return NodeSet.from_values(eps * np.arange(s) / m)


def colliding_nodes(beta: float, m: int) -> NodeSet:
    """Two 3-point clumps of spacing 1/(2m), the second starting beta + 1/m after the first"""
    first = np.arange(3) / (2 * m)
    second = beta + 1 / m + first
    return NodeSet.from_values(np.concatenate([first, second]))


def good_set_example(eps: float) -> NodeSet:
    """Clusters of 3, 2 and 4 points of spacing eps at 1/4, 1/2 and 3/4"""
    return NodeSet.from_values(np.concatenate([
        0.25 + eps * np.arange(3),
        0.5 + eps * np.arange(2),
        0.75 + eps * np.arange(4),
    ]))


def dft_nodes(s: int) -> NodeSet:
    return NodeSet.from_values(np.arange(s) / s)
