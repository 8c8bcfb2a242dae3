"""Stellar-rank thresholds for non-Gaussianity witnesses of single-mode states."""

__version__ = "0.1.0"

from .certifier import CertificationResult, certify  # noqa: E402
from .engine import OptimizerConfig, ThresholdTable, build_table, min_eig_projected  # noqa: E402
from .families import WitnessFamily  # noqa: E402
from .gaussian_transform import GaussianParams, QuadraticForm  # noqa: E402

__all__ = [
    "CertificationResult",
    "GaussianParams",
    "OptimizerConfig",
    "QuadraticForm",
    "ThresholdTable",
    "WitnessFamily",
    "build_table",
    "certify",
    "min_eig_projected",
]
