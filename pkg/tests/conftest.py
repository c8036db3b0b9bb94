import numpy as np
import pytest

from models.fourier_models import NodeSet
from strategy.node_sets import good_set_example, motivational_nodes


@pytest.fixture
def motivational():
    return motivational_nodes()


@pytest.fixture
def antipodal():
    return NodeSet((0.0, 0.5))


@pytest.fixture
def good_set():
    return good_set_example(1 / 300)


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    """Keep CLI runs away from the developer's .env and working directory"""
    monkeypatch.setenv('FOURIER_COND_LOG_FILE', str(tmp_path / 'test.log'))
    monkeypatch.setenv('FOURIER_COND_OUTPUT_DIR', str(tmp_path / 'results'))
    monkeypatch.setenv('FOURIER_COND_THREADS', '1')


def _random_nodes(seed: int, s: int, min_gap: float = 1e-6) -> NodeSet:
    """s random torus points with every gap at least min_gap"""
    rng = np.random.default_rng(seed)
    while True:
        pts = np.sort(rng.random(s))
        gaps = np.append(np.diff(pts), 1.0 - pts[-1] + pts[0])
        if gaps.min() >= min_gap:
            return NodeSet(tuple(pts))


def _clustered_nodes(seed: int, s: int) -> NodeSet:
    """Random clusters of close points, the regime the multiscale bounds target"""
    rng = np.random.default_rng(seed)
    centres = rng.random(max(1, s // 3))
    pts = []
    for i in range(s):
        c = centres[i % centres.size]
        pts.append(c + rng.uniform(0.0, 0.02))
    pts = np.sort(np.asarray(pts) % 1.0)
    gaps = np.append(np.diff(pts), 1.0 - pts[-1] + pts[0])
    if gaps.min() < 1e-6:
        return _random_nodes(seed, s)
    return NodeSet(tuple(pts))


@pytest.fixture
def random_nodes():
    return _random_nodes


@pytest.fixture
def clustered_nodes():
    return _clustered_nodes
