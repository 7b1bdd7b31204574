"""Model tables: assigned risks, group masses, and outcome prevalences.

A grouped table describes one risk model applied to a population: each group
carries the model's assigned risk, the fraction of the population in the
group, and the group's observed (or exactly computed) outcome prevalence.
A joint table cross-classifies two models over the same population.

Group keys are opaque labels. Matching between tables (calibration transfer,
risk assignment to joint cells) is by key, never by risk value: two distinct
groups of one model may legitimately share an assigned risk under another.
"""

import math
from dataclasses import dataclass, field

from .distributions import MASS_SUM_TOL, RISK_MERGE_TOL, RiskDistribution
from .errors import (
    EmptyInput,
    InvariantViolation,
    MassSumOutOfTolerance,
    NonFiniteValue,
    RiskOutOfRange,
)


def format_label(x: float) -> str:
    """Canonical 12-significant-digit label for a numeric group key."""
    return format(float(x), ".12g")


def _check_unit_interval(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise NonFiniteValue(f"non-finite {name} {x}")
    if not 0.0 <= x <= 1.0:
        raise RiskOutOfRange(f"{name} {x} outside [0, 1]")
    return x


def _check_mass(f: float) -> float:
    f = float(f)
    if not math.isfinite(f):
        raise NonFiniteValue(f"non-finite mass {f}")
    if f < 0.0:
        raise MassSumOutOfTolerance(f"negative mass {f}")
    return f


def _check_total_mass(total: float) -> None:
    if abs(total - 1.0) > MASS_SUM_TOL:
        raise MassSumOutOfTolerance(f"masses sum to {total!r}, not 1 within {MASS_SUM_TOL}")


@dataclass(frozen=True)
class Group:
    """One risk group: assigned risk, population mass, outcome prevalence."""

    key: str
    risk: float
    mass: float
    prevalence: float


@dataclass(frozen=True)
class GroupedModelTable:
    """One model's risk groups over a population, sorted by assigned risk.

    Assigned risks are pairwise distinct (groups sharing a risk within 1e-12
    are merged at construction, prevalence mass-weighted). population_mean is
    the mass-weighted prevalence. declared_calibrated marks tables whose
    prevalences were defaulted to the assigned risks at load time.
    """

    groups: tuple[Group, ...]
    population_mean: float
    declared_calibrated: bool = field(default=False, compare=False)

    @property
    def risks(self) -> tuple[float, ...]:
        return tuple(g.risk for g in self.groups)

    @property
    def masses(self) -> tuple[float, ...]:
        return tuple(g.mass for g in self.groups)

    @property
    def prevalences(self) -> tuple[float, ...]:
        return tuple(g.prevalence for g in self.groups)

    @property
    def keys(self) -> tuple[str, ...]:
        return tuple(g.key for g in self.groups)


def make_grouped_table(
    entries, *, declared_calibrated: bool = False
) -> GroupedModelTable:
    """Build a GroupedModelTable from (key, risk, mass, prevalence) entries.

    Zero-mass groups are dropped. Groups whose risks agree within 1e-12 are
    merged: mass-weighted risk and prevalence, member keys joined with "|" in
    sorted order.
    """
    rows = []
    for key, risk, mass, prev in entries:
        mass = _check_mass(mass)
        if mass == 0.0:
            continue
        rows.append(
            (
                _check_unit_interval("risk", risk),
                mass,
                _check_unit_interval("prevalence", prev),
                str(key),
            )
        )
    if not rows:
        raise EmptyInput("table needs at least one group with positive mass")
    _check_total_mass(math.fsum(m for _, m, _, _ in rows))
    rows.sort()
    merged: list[list] = []
    for risk, mass, prev, key in rows:
        if merged and risk - merged[-1][0] <= RISK_MERGE_TOL:
            r0, m0, p0, keys = merged[-1]
            m = m0 + mass
            merged[-1] = [(r0 * m0 + risk * mass) / m, m, (p0 * m0 + prev * mass) / m, keys + [key]]
        else:
            merged.append([risk, mass, prev, [key]])
    groups = tuple(
        Group(key="|".join(sorted(keys)), risk=r, mass=m, prevalence=p)
        for r, m, p, keys in merged
    )
    seen = set()
    for g in groups:
        if g.key in seen:
            raise InvariantViolation(f"duplicate group key {g.key!r}")
        seen.add(g.key)
    mean = math.fsum(g.mass * g.prevalence for g in groups)
    return GroupedModelTable(
        groups=groups,
        population_mean=mean,
        declared_calibrated=declared_calibrated,
    )


def perfect_model_table(dist: RiskDistribution) -> GroupedModelTable:
    """Table of a model that assigns everyone their true risk.

    Groups are the support points of the risk distribution; assigned risk and
    prevalence both equal the true risk.
    """
    return make_grouped_table(
        (format_label(p), p, f, p) for p, f in dist.points
    )


@dataclass(frozen=True)
class JointCell:
    """One cell of a two-model cross-classification."""

    key1: str
    key2: str
    risk1: float
    risk2: float
    mass: float
    prevalence: float


@dataclass(frozen=True)
class JointModelTable:
    """Cross-classification of two models over one population.

    Cells are keyed by (first-model group, second-model group) pairs and
    sorted by (risk1, risk2, key1, key2). Marginalizing over either model
    reproduces the other model's grouped table.
    """

    cells: tuple[JointCell, ...]
    population_mean: float

    def marginal(self, axis: int) -> GroupedModelTable:
        """Grouped table of model 1 (axis=1) or model 2 (axis=2).

        Within each group the assigned risk is constant by construction; the
        prevalence is the mass-weighted mean over the group's cells.
        """
        if axis not in (1, 2):
            raise ValueError("axis must be 1 or 2")
        acc: dict[str, list] = {}
        for c in self.cells:
            key = c.key1 if axis == 1 else c.key2
            risk = c.risk1 if axis == 1 else c.risk2
            slot = acc.setdefault(key, [risk, 0.0, 0.0])
            if abs(risk - slot[0]) > RISK_MERGE_TOL:
                raise InvariantViolation(
                    f"group {key!r} carries conflicting assigned risks {slot[0]!r} and {risk!r}"
                )
            slot[1] += c.mass
            slot[2] += c.mass * c.prevalence
        return make_grouped_table(
            (key, risk, mass, wsum / mass) for key, (risk, mass, wsum) in acc.items()
        )


def make_joint_table(cells) -> JointModelTable:
    """Build a JointModelTable from (key1, key2, risk1, risk2, mass, prevalence).

    Zero-mass cells are dropped; duplicate (key1, key2) cells are merged with
    mass-weighted prevalence and must agree on both assigned risks.
    """
    acc: dict[tuple[str, str], list] = {}
    for key1, key2, r1, r2, mass, prev in cells:
        mass = _check_mass(mass)
        if mass == 0.0:
            continue
        r1 = _check_unit_interval("risk1", r1)
        r2 = _check_unit_interval("risk2", r2)
        prev = _check_unit_interval("prevalence", prev)
        k = (str(key1), str(key2))
        if k in acc:
            slot = acc[k]
            if abs(r1 - slot[0]) > RISK_MERGE_TOL or abs(r2 - slot[1]) > RISK_MERGE_TOL:
                raise InvariantViolation(f"cell {k} repeated with conflicting risks")
            slot[2] += mass
            slot[3] += mass * prev
        else:
            acc[k] = [r1, r2, mass, prev * mass]
    if not acc:
        raise EmptyInput("joint table needs at least one cell with positive mass")
    _check_total_mass(math.fsum(slot[2] for slot in acc.values()))
    cells_out = tuple(
        sorted(
            (
                JointCell(
                    key1=k1, key2=k2, risk1=r1, risk2=r2, mass=m, prevalence=wsum / m
                )
                for (k1, k2), (r1, r2, m, wsum) in acc.items()
            ),
            key=lambda c: (c.risk1, c.risk2, c.key1, c.key2),
        )
    )
    mean = math.fsum(c.mass * c.prevalence for c in cells_out)
    return JointModelTable(cells=cells_out, population_mean=mean)
