import os
from dataclasses import dataclass, field
from enum import Enum

import psutil


class BoundMethod(Enum):
    MAIN1 = "Main1"
    MAIN1_REFERENCE = "Main1Reference"
    MAIN2 = "Main2"
    THM2_EQ3 = "Thm2Eq3"
    THM2_EQ4 = "Thm2Eq4"
    CLUMPS_COROLLARY = "ClumpsCorollary"
    GAUTSCHI_BAZAN = "GautschiBazan"
    WELL_SEPARATED_LOWER = "WellSeparatedLower"
    SIGMA1_UPPER = "Sigma1Upper"
    CONSTRUCTIVE = "Constructive"


# Methods whose value depends on tau and that best_bound may sweep over
SWEEP_METHODS = (
    BoundMethod.MAIN1,
    BoundMethod.MAIN1_REFERENCE,
    BoundMethod.MAIN2,
    BoundMethod.THM2_EQ3,
    BoundMethod.THM2_EQ4,
    BoundMethod.CONSTRUCTIVE,
)


class BadSetVariant(Enum):
    GENERAL = "general"
    SEPARATED = "separated"


class InterpolantKind(Enum):
    FAMILY = "family"
    GOOD = "good"
    BAD_GENERAL = "bad-general"
    BAD_SEPARATED = "bad-separated"
    MINNORM = "minnorm"


class ExperimentName(Enum):
    MOTIVATIONAL = "motivational"
    MULTISCALE = "multiscale"
    SPIKETRAIN = "spiketrain"
    COLLIDING = "colliding"


@dataclass(frozen=True)
class NumericsConfig:
    geom_tol: float = 1e-12          # slack on the closed side of every "<= tau" test
    dedup_tol: float = 1e-14         # points closer than this make a node set degenerate
    interp_tol: float = 1e-8         # max-norm Kronecker residual accepted from a construction
    floor_tol: float = 1e-9          # slack for floor/ceil of computed reals
    sup_oversample: int = 32         # sup_norm samples per coefficient
    golden_xtol: float = 1e-10
    golden_maxiter: int = 200
    log_space_threshold: int = 20    # products longer than this are summed as logs
    validity_rtol: float = 1e-9      # slack when comparing a bound against the oracle


def default_thread_count() -> int:
    return psutil.cpu_count(logical=True) or 1


@dataclass
class RuntimeConfig:
    threads: int = field(default_factory=default_thread_count)
    output_dir: str = "results"
    log_file: str = "fourier_cond.log"
    log_level: str = "INFO"

    @classmethod
    def from_env(cls) -> "RuntimeConfig":
        """Build the runtime configuration from FOURIER_COND_* environment variables"""
        return cls(
            threads=max(1, int(os.environ.get('FOURIER_COND_THREADS', default_thread_count()))),
            output_dir=os.environ.get('FOURIER_COND_OUTPUT_DIR', 'results'),
            log_file=os.environ.get('FOURIER_COND_LOG_FILE', 'fourier_cond.log'),
            log_level=os.environ.get('LOG_LEVEL', 'INFO').upper(),
        )


NUMERICS = NumericsConfig()
