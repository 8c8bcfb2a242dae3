"""Turn a measured witness value into a lower bound on stellar rank."""

from dataclasses import dataclass

from .errors import ContractViolation, InvalidMeasurementError

SCALES = ("normalized", "raw")


@dataclass(frozen=True)
class CertificationResult:
    certified_min_rank: int
    witness_value: float
    crossed_threshold: float = None
    scale: str = "normalized"

    @property
    def normalized(self):
        return self.scale == "normalized"

    def to_dict(self):
        return {
            "certified_min_rank": self.certified_min_rank,
            "witness_value": self.witness_value,
            "crossed_threshold": self.crossed_threshold,
            "scale": self.scale,
        }


def certify(value, table, scale="normalized"):
    """Certify ``rank >= m + 1`` for the largest ``m`` with ``value < threshold[m]``.

    The comparison is strict and made on the declared scale only: a
    normalized witness against normalized thresholds, a raw one against raw
    thresholds.  A value at or above every threshold certifies nothing
    (rank 0).
    """
    if scale not in SCALES:
        raise ContractViolation(f"unknown scale {scale!r}; use one of {SCALES}")
    value = float(value)
    if value < -1e-9:
        raise InvalidMeasurementError(f"witness values are non-negative, got {value}")
    # rounding-level negatives must not slip under thresholds that are exactly zero
    probe = max(value, 0.0)
    thresholds = table.scale(scale)
    below = [m for m, t in enumerate(thresholds) if probe < t]
    if not below:
        return CertificationResult(0, value, None, scale)
    m = max(below)
    return CertificationResult(m + 1, value, float(thresholds[m]), scale)
