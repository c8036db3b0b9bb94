from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from config.settings import ExperimentName


@dataclass
class ExperimentSpec:
    name: ExperimentName
    output_dir: str = "results"

    # "schedule" uses the hand-picked tau rule of each experiment, "auto" sweeps candidate taus
    tau_mode: str = "schedule"

    # motivational: m range (inclusive)
    m_min: int = 54
    m_max: int = 600

    # multiscale: epsilon grid (log-spaced) and the two bandwidths
    eps_log_min: float = -3.0
    eps_log_max: float = 0.0
    eps_points: int = 301
    multiscale_ms: Tuple[int, ...] = (400, 100)
    multiscale_tau: float = 0.3

    # spiketrain
    spike_m: int = 200
    spike_s_min: int = 5
    spike_s_max: int = 30
    spike_eps: Tuple[float, ...] = (0.9, 0.7, 0.5)
    barnett_constant: float = 500.0

    # colliding: beta in [beta_min_factor/m, beta_max_factor/m] with a fixed step
    colliding_m: int = 100
    beta_min_factor: float = 0.1
    beta_max_factor: float = 20.0
    beta_step_factor: float = 0.1
    beta_tau_threshold: float = 18.0  # tau = beta once beta >= threshold/m, else 1/2

    # Points this close (in log10 epsilon) to a knee are left out of the segment fits
    knee_margin_decades: float = 0.15

    def epsilon_grid(self) -> np.ndarray:
        return np.logspace(self.eps_log_min, self.eps_log_max, self.eps_points)

    def beta_grid(self) -> np.ndarray:
        m = self.colliding_m
        count = int(round((self.beta_max_factor - self.beta_min_factor) / self.beta_step_factor)) + 1
        factors = self.beta_min_factor + self.beta_step_factor * np.arange(count)
        return factors / m

    def m_grid(self) -> np.ndarray:
        return np.arange(self.m_min, self.m_max + 1)

    def s_grid(self) -> np.ndarray:
        return np.arange(self.spike_s_min, self.spike_s_max + 1)


def default_spec(name: ExperimentName, output_dir: Optional[str] = None,
                 tau_mode: str = "schedule") -> ExperimentSpec:
    """Experiment defaults matching the published parameter ranges"""
    spec = ExperimentSpec(name=name, tau_mode=tau_mode)
    if output_dir:
        spec.output_dir = output_dir
    return spec
