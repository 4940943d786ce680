"""Small statistics helpers shared by the Monte Carlo surfaces."""

from __future__ import annotations

from dataclasses import dataclass
from statistics import NormalDist

from .errors import InvalidParameterError

__all__ = ["MonteCarloEstimate", "wilson_interval", "z_value"]


@dataclass(frozen=True)
class MonteCarloEstimate:
    successes: int
    trials: int
    estimate: float
    ci_low: float
    ci_high: float
    confidence: float

    def overlaps(self, other: "MonteCarloEstimate") -> bool:
        return self.ci_low <= other.ci_high and other.ci_low <= self.ci_high

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high


def z_value(confidence: float) -> float:
    if not (0.0 < confidence < 1.0):
        raise InvalidParameterError(f"confidence must be in (0, 1), got {confidence}")
    return NormalDist().inv_cdf(0.5 + confidence / 2.0)


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    if not (0 <= successes <= trials):
        raise InvalidParameterError(f"successes {successes} out of range for {trials} trials")
    z = z_value(confidence)
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (phat + z2 / (2.0 * trials)) / denom
    half = (z / denom) * ((phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials)) ** 0.5)
    return max(0.0, centre - half), min(1.0, centre + half)
