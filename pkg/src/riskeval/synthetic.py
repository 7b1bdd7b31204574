"""Synthetic four-covariate population with exactly known risks.

One ternary covariate z0 in {-1, 0, 1} and three binary covariates z1, z2, z3
define 24 cells. True risk depends on z0's branch and doubles with each active
binary covariate; a single parameter alpha (the probability that each binary
covariate is active) controls how much risk heterogeneity the population has
without moving its mean, which is 0.10 for every alpha.

Projecting onto a covariate subset yields the well-calibrated model that
assigns each subgroup its exact outcome prevalence. Cross-classifying two
subsets yields the joint table of both models.
"""

import itertools
import math
from dataclasses import dataclass

from .distributions import RiskDistribution, make_distribution
from .errors import ParameterOutOfRange
from .tables import GroupedModelTable, JointModelTable, make_grouped_table, make_joint_table

COVARIATES = ("z0", "z1", "z2", "z3")

_TAU = {-1: 0.8, 0: 0.1, 1: 0.1}


@dataclass(frozen=True)
class CovariateCell:
    z0: int
    z1: int
    z2: int
    z3: int
    mass: float
    risk: float

    def value(self, name: str) -> int:
        return getattr(self, name)


@dataclass(frozen=True)
class SyntheticPopulation:
    """All 24 covariate cells for one alpha. Boundary alphas keep zero-mass cells."""

    alpha: float
    cells: tuple[CovariateCell, ...]


def _cell_risk(z0: int, s: int) -> float:
    # s = z1 + z2 + z3; the high-risk branch z0 = 1 uses an 8x larger slope.
    if z0 == 1:
        return 0.1 + 0.08 * 2**s
    return 0.1 + 0.01 * z0 * 2**s


def build_population(alpha: float) -> SyntheticPopulation:
    """Enumerate the 24 cells for binary-covariate activation probability alpha."""
    alpha = float(alpha)
    if not math.isfinite(alpha) or not 0.0 <= alpha <= 1.0:
        raise ParameterOutOfRange(f"alpha {alpha} outside [0, 1]")
    cells = []
    for z0, z1, z2, z3 in itertools.product((-1, 0, 1), (0, 1), (0, 1), (0, 1)):
        s = z1 + z2 + z3
        mass = _TAU[z0] * alpha**s * (1.0 - alpha) ** (3 - s)
        cells.append(
            CovariateCell(z0=z0, z1=z1, z2=z2, z3=z3, mass=mass, risk=_cell_risk(z0, s))
        )
    return SyntheticPopulation(alpha=alpha, cells=tuple(cells))


def risk_distribution(pop: SyntheticPopulation) -> RiskDistribution:
    """Distribution of true risk: nine support points for interior alpha."""
    return make_distribution((c.risk, c.mass) for c in pop.cells)


def _canonical_subset(subset) -> tuple[str, ...]:
    names = list(subset)
    if not names:
        raise ParameterOutOfRange("covariate subset must be nonempty")
    for name in names:
        if name not in COVARIATES:
            raise ParameterOutOfRange(f"unknown covariate {name!r}")
    if len(set(names)) != len(names):
        raise ParameterOutOfRange(f"duplicate covariate in subset {names}")
    return tuple(n for n in COVARIATES if n in names)


def _cell_label(cell: CovariateCell, subset: tuple[str, ...]) -> str:
    return ",".join(f"{n}={cell.value(n)}" for n in subset)


def _project(pop: SyntheticPopulation, subset):
    """Grouped table for a covariate subset plus the cell-label -> group-key map."""
    subset = _canonical_subset(subset)
    acc: dict[str, list] = {}
    for c in pop.cells:
        if c.mass == 0.0:
            continue
        slot = acc.setdefault(_cell_label(c, subset), [0.0, 0.0])
        slot[0] += c.mass
        slot[1] += c.mass * c.risk
    table = make_grouped_table(
        # Well-calibrated convention: assigned risk equals the subgroup
        # prevalence, so equal-prevalence subgroups merge at construction.
        (label, wsum / mass, mass, wsum / mass)
        for label, (mass, wsum) in acc.items()
    )
    label_to_key = {
        member: g.key for g in table.groups for member in g.key.split("|")
    }
    return table, label_to_key


def project_model(pop: SyntheticPopulation, subset) -> GroupedModelTable:
    """Well-calibrated model using only the given covariates.

    Groups are covariate-value classes; classes with equal prevalence (within
    1e-12) merge into one group. Zero-mass classes are dropped.
    """
    table, _ = _project(pop, subset)
    return table


def cross_classify(pop: SyntheticPopulation, subset1, subset2) -> JointModelTable:
    """Joint table of the two projected models, cells keyed by group pairs."""
    table1, map1 = _project(pop, _canonical_subset(subset1))
    table2, map2 = _project(pop, _canonical_subset(subset2))
    risk1 = {g.key: g.risk for g in table1.groups}
    risk2 = {g.key: g.risk for g in table2.groups}
    s1 = _canonical_subset(subset1)
    s2 = _canonical_subset(subset2)
    rows = []
    for c in pop.cells:
        if c.mass == 0.0:
            continue
        k1 = map1[_cell_label(c, s1)]
        k2 = map2[_cell_label(c, s2)]
        rows.append((k1, k2, risk1[k1], risk2[k2], c.mass, c.risk))
    return make_joint_table(rows)


def closed_form_prevalence_oracle(alpha: float, z0: int, z1: int, z2: int | None = None) -> float:
    """Exact subgroup prevalence for the two- or three-covariate model.

    Averaging the doubling rule over the unobserved binary covariates gives a
    factor (1 + alpha) per hidden covariate.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha) or not 0.0 <= alpha <= 1.0:
        raise ParameterOutOfRange(f"alpha {alpha} outside [0, 1]")
    if z0 not in (-1, 0, 1):
        raise ParameterOutOfRange(f"z0 {z0} not in {{-1, 0, 1}}")
    for name, z in (("z1", z1), ("z2", z2)):
        if z is not None and z not in (0, 1):
            raise ParameterOutOfRange(f"{name} {z} not in {{0, 1}}")
    if z0 == 0:
        return 0.1
    slope = 0.08 if z0 == 1 else -0.01
    if z2 is None:
        return 0.1 + slope * (1.0 + alpha) ** 2 * 2**z1
    return 0.1 + slope * (1.0 + alpha) * 2 ** (z1 + z2)
