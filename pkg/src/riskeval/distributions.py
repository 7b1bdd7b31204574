"""Discrete distributions of true outcome risk over a population.

A risk distribution assigns probability mass to a finite set of risk values in
[0, 1]. Its mean is the population outcome rate; its variance measures risk
heterogeneity and is bounded above by mean*(1 - mean).
"""

import math
from dataclasses import dataclass

from .errors import EmptyInput, MassSumOutOfTolerance, NonFiniteValue, RiskOutOfRange

MASS_SUM_TOL = 1e-9
RISK_MERGE_TOL = 1e-12


@dataclass(frozen=True)
class RiskDistribution:
    """Finite support distribution of true risk.

    points holds (risk, mass) pairs sorted by risk, with risks pairwise
    distinct beyond merge tolerance and masses positive. Construct with
    make_distribution rather than directly.
    """

    points: tuple[tuple[float, float], ...]

    @property
    def risks(self) -> tuple[float, ...]:
        return tuple(p for p, _ in self.points)

    @property
    def masses(self) -> tuple[float, ...]:
        return tuple(f for _, f in self.points)

    def mean(self) -> float:
        return math.fsum(p * f for p, f in self.points)

    def variance(self) -> float:
        m = self.mean()
        return math.fsum(f * (p - m) ** 2 for p, f in self.points)


def make_distribution(points) -> RiskDistribution:
    """Build a RiskDistribution from (risk, mass) pairs.

    Zero-mass points are dropped, risks equal within 1e-12 are merged
    (mass-weighted), and the result is sorted by risk. Masses must sum to 1
    within 1e-9 after validation.
    """
    pairs = [(float(p), float(f)) for p, f in points]
    if not pairs:
        raise EmptyInput("risk distribution needs at least one support point")
    for p, f in pairs:
        if not (math.isfinite(p) and math.isfinite(f)):
            raise NonFiniteValue(f"non-finite support point ({p}, {f})")
        if not 0.0 <= p <= 1.0:
            raise RiskOutOfRange(f"risk {p} outside [0, 1]")
        if f < 0.0:
            raise MassSumOutOfTolerance(f"negative mass {f}")
    pairs = [(p, f) for p, f in pairs if f > 0.0]
    if not pairs:
        raise EmptyInput("all support points have zero mass")
    total = math.fsum(f for _, f in pairs)
    if abs(total - 1.0) > MASS_SUM_TOL:
        raise MassSumOutOfTolerance(f"masses sum to {total!r}, not 1 within {MASS_SUM_TOL}")
    pairs.sort()
    merged: list[tuple[float, float]] = []
    for p, f in pairs:
        if merged and p - merged[-1][0] <= RISK_MERGE_TOL:
            q, g = merged[-1]
            merged[-1] = ((q * g + p * f) / (g + f), g + f)
        else:
            merged.append((p, f))
    return RiskDistribution(points=tuple(merged))


def constant_distribution(pi: float) -> RiskDistribution:
    """All mass at a single risk equal to the population rate pi."""
    return make_distribution([(pi, 1.0)])


def deterministic_distribution(pi: float) -> RiskDistribution:
    """Mass 1 - pi at risk 0 and mass pi at risk 1: maximal heterogeneity.

    Variance is pi*(1 - pi), the upper bound for any distribution with mean pi.
    """
    if not math.isfinite(pi):
        raise NonFiniteValue(f"non-finite rate {pi}")
    if not 0.0 <= pi <= 1.0:
        raise RiskOutOfRange(f"rate {pi} outside [0, 1]")
    return make_distribution([(0.0, 1.0 - pi), (1.0, pi)])
