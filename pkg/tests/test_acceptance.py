"""Acceptance gate: golden numbers and exact identities for the full pipeline.

Golden values are asserted in percent with an absolute band of 0.05
percentage points; identities hold to 1e-12 on at least 1000 randomized
tables drawn from a fixed seed.
"""

import math

import numpy as np

from conftest import (
    SUBSET_1,
    SUBSET_2,
    joint_as_grouped,
    pair_concordance_oracle,
    random_grouped_table,
    random_joint_table,
    relabeled,
)
from riskeval import (
    brier_score,
    build_population,
    calibration_bias_sq,
    compare,
    concordance,
    constant_distribution,
    cross_classify,
    deterministic_distribution,
    integrated_discrimination,
    load_grouped,
    load_joint,
    make_grouped_table,
    perfect_model_table,
    precision_loss,
    prevalence_variance,
    project_model,
    risk_distribution,
    ro_correlation,
    subgroup_precision_gain,
    ten_year_risk,
    transfer_calibration,
    write_grouped,
    write_joint,
)
from riskeval.cli import main, percent_round

SEED = 20260814
TOL = 1e-12
GOLDEN_PP = 0.05

TEN_YEAR_COMPETING = 0.020241816612607693
MAX_HETEROGENEITY_SD = 0.1408264374072896


def golden(value: float, target_pct: float) -> None:
    assert abs(100.0 * value - target_pct) <= GOLDEN_PP, (value, target_pct)


def test_01_population_variance_and_closed_form(dist_a, dist_b):
    golden(dist_a.variance(), 0.30)
    golden(dist_b.variance(), 2.83)
    for alpha in np.linspace(0.0, 1.0, 21):
        dist = risk_distribution(build_population(float(alpha)))
        closed = 7.2e-4 * (1 + 3 * float(alpha)) ** 3
        assert abs(dist.variance() - closed) <= TOL


def test_02_two_covariate_model_variances(model1_a, model1_b):
    golden(prevalence_variance(model1_a), 0.24)
    golden(prevalence_variance(model1_b), 2.57)


def test_03_ro_correlations(model1_a, model1_b, dist_a, dist_b):
    golden(ro_correlation(model1_a), 16.3)
    golden(ro_correlation(model1_b), 53.4)
    golden(ro_correlation(perfect_model_table(dist_a)), 18.1)
    golden(ro_correlation(perfect_model_table(dist_b)), 56.1)


def test_04_concordances(model1_a, model1_b, dist_a, dist_b):
    golden(concordance(model1_a), 59.4)
    golden(concordance(model1_b), 80.6)
    golden(concordance(perfect_model_table(dist_a)), 60.3)
    golden(concordance(perfect_model_table(dist_b)), 83.3)
    pi = 0.1
    constant = perfect_model_table(constant_distribution(pi))
    assert concordance(constant) == 0.5
    deterministic = perfect_model_table(deterministic_distribution(pi))
    assert concordance(deterministic) == 1.0


def test_05_transfer_calibration_biases(model1_a, model1_b, model2_a, model2_b):
    moved1 = transfer_calibration(model1_a, model1_b)
    golden(math.sqrt(calibration_bias_sq(moved1)), 8.9)
    moved2 = transfer_calibration(model2_a, model2_b)
    golden(math.sqrt(calibration_bias_sq(moved2)), 5.5)


def test_06_model_expansion_gains(model1_a, model2_a, model1_b, model2_b):
    comp_a = compare(model1_a, model2_a)
    comp_b = compare(model1_b, model2_b)
    golden(comp_a.precision_difference, 0.03)
    golden(comp_b.precision_difference, 0.13)
    golden(ro_correlation(model2_a) - ro_correlation(model1_a), 0.9)
    golden(ro_correlation(model2_b) - ro_correlation(model1_b), 1.3)
    golden(comp_b.concordance_difference, 1.5)
    # The 0.5pp concordance gain target is a difference of 0.1pp-rounded
    # percents (59.9 - 59.4); the raw gap is 0.553pp, so assert the rounded
    # difference exactly and keep a 0.1pp band on the raw value.
    z1, z2 = concordance(model1_a), concordance(model2_a)
    assert percent_round(z2) - percent_round(z1) == 0.5
    assert abs(100.0 * comp_a.concordance_difference - 0.5) <= 0.1


def test_07_subgroup_gains_population_b(pop_b):
    joint = cross_classify(pop_b, SUBSET_1, SUBSET_2)
    report = subgroup_precision_gain(joint)
    by_risk = {round(row.risk, 6): row for row in report.rows}
    assert by_risk[0.1].sd == 0.0
    top = max(report.rows, key=lambda row: row.sd)
    golden(top.sd, 11.5)
    golden(top.risk, 61.8)
    prevalences = [cell.prevalence for cell in joint.cells]
    assert any(abs(100.0 * p - 38.8) <= GOLDEN_PP for p in prevalences)
    assert any(abs(100.0 * p - 67.6) <= GOLDEN_PP for p in prevalences)


def test_08_rate_conversion_and_heterogeneity_bound():
    risk = ten_year_risk(0.0021, 0.0053, 10)
    assert abs(risk - TEN_YEAR_COMPETING) <= TOL
    golden(risk, 2.02)
    bound = math.sqrt(deterministic_distribution(risk).variance())
    assert abs(bound - MAX_HETEROGENEITY_SD) <= TOL
    golden(bound, 14.1)


def test_09_observed_decile_sd_precision_gain():
    pi = ten_year_risk(0.0021, 0.0053, 10)
    tables = []
    for sd in (0.0104, 0.0122):
        tables.append(
            make_grouped_table(
                [
                    ("lo", pi - sd, 0.5, pi - sd),
                    ("hi", pi + sd, 0.5, pi + sd),
                ]
            )
        )
    diff = compare(tables[0], tables[1]).precision_difference
    assert abs(diff - (0.0122**2 - 0.0104**2)) <= TOL
    golden(diff, 0.004)


def test_10_brier_decomposition_identity():
    rng = np.random.default_rng(SEED)
    for _ in range(1000):
        table = random_grouped_table(rng)
        parts = calibration_bias_sq(table) + precision_loss(table)
        assert abs(brier_score(table) - parts) <= TOL


def test_11_correlation_and_idi_identities():
    rng = np.random.default_rng(SEED + 1)
    for _ in range(1000):
        table = random_grouped_table(rng)
        pi = table.population_mean
        rho = ro_correlation(table)
        assert abs(rho**2 - prevalence_variance(table) / (pi * (1 - pi))) <= TOL
        assert abs(integrated_discrimination(table) - rho**2) <= TOL


def test_12_variance_ordering_chain():
    subsets = (("z0",), SUBSET_1, SUBSET_2)
    for alpha in np.linspace(0.0, 1.0, 21):
        pop = build_population(float(alpha))
        variances = [prevalence_variance(project_model(pop, s)) for s in subsets]
        sigma2 = risk_distribution(pop).variance()
        chain = [0.0, *variances, sigma2, 0.1 * 0.9]
        for lo, hi in zip(chain, chain[1:]):
            assert lo <= hi + TOL


def test_13_subgroup_gain_decomposition():
    rng = np.random.default_rng(SEED + 2)
    for _ in range(1000):
        joint = random_joint_table(rng, max_side=4)
        report = subgroup_precision_gain(joint)
        var_joint = prevalence_variance(joint_as_grouped(joint))
        var_first = prevalence_variance(joint.marginal(1))
        assert report.total_gain >= -TOL
        assert abs(report.total_gain - (var_joint - var_first)) <= TOL


def test_14_concordance_oracle_and_relabel_invariance():
    rng = np.random.default_rng(SEED + 3)
    transforms = (
        lambda r: r * r,
        lambda r: 0.25 + r / 2,
        lambda r: math.sqrt(r),
        lambda r: r**3,
    )
    for i in range(1000):
        table = random_grouped_table(rng)
        zeta = concordance(table)
        assert abs(zeta - pair_concordance_oracle(table)) <= TOL
        assert abs(concordance(relabeled(table, transforms[i % 4])) - zeta) <= TOL


def test_15_round_trip_and_deterministic_cli(tmp_path, capsys):
    rng = np.random.default_rng(SEED + 4)
    for i in range(150):
        table = random_grouped_table(rng)
        p1, p2 = tmp_path / "g1.csv", tmp_path / "g2.csv"
        write_grouped(table, p1)
        loaded = load_grouped(p1)
        write_grouped(loaded, p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert all(
            abs(a.risk - b.risk) <= TOL
            and abs(a.mass - b.mass) <= TOL
            and abs(a.prevalence - b.prevalence) <= TOL
            for a, b in zip(loaded.groups, table.groups)
        )
    for i in range(100):
        joint = random_joint_table(rng)
        p1, p2 = tmp_path / "j1.csv", tmp_path / "j2.csv"
        write_joint(joint, p1)
        write_joint(load_joint(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    args = ["synth", "--alpha", "0.2,0.8", "--models", "z0z1,z0z1z2"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    capsys.readouterr()
    names = sorted(p.name for p in out1.iterdir())
    assert names == sorted(p.name for p in out2.iterdir())
    for name in names:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
