import math

import numpy as np
import pytest

from core.exceptions import ConfigError, DataError, OrientationError
from core.grid import EstimateGrid, Orientation
from core.results import Method
from pooling.anova import one_way_anova
from pooling.dispatch import pool_grid, rubin_inputs_from_grid
from pooling.percentile import pool_boot_mi_normal, pool_boot_mi_percentile, pool_mi_boot_pooled_percentile
from pooling.quantiles import check_alpha, empirical_percentile, t_quantile
from pooling.rubin import RubinInputs, bootstrap_within_variances, pool_mi_boot_rubin, pool_rubin
from pooling.von_hippel import pool_von_hippel, satterthwaite_df, von_hippel_variance

EXAMPLE = [[1.0, 1.2], [2.0, 2.2], [3.0, 3.2]]
FALLBACK = [[1.0, 3.0], [2.0, 4.0]]


def boot_grid(rows):
    return EstimateGrid(np.array(rows, dtype=float), Orientation.BOOTSTRAP_OUTER)


def mi_grid(rows, direct=None, direct_var=None):
    return EstimateGrid(np.array(rows, dtype=float), Orientation.IMPUTATION_OUTER,
                        direct_estimates=direct, direct_variances=direct_var)


# Rubin's rules

def test_rubin_hand_example():
    result = pool_rubin(RubinInputs([1.0, 2.0, 3.0], [1.0, 1.0, 1.0]))
    assert result.point == pytest.approx(2.0)
    assert result.variance == pytest.approx(7.0 / 3.0, rel=1e-12)
    assert result.df == pytest.approx(6.125, rel=1e-12)
    half = t_quantile(0.975, 6.125) * math.sqrt(7.0 / 3.0)
    assert result.ci_lower == pytest.approx(2.0 - half, rel=1e-12)
    assert result.ci_upper == pytest.approx(2.0 + half, rel=1e-12)


def test_rubin_zero_between_variance_uses_normal_quantiles():
    result = pool_rubin(RubinInputs([5.0] * 4, [2.0] * 4))
    assert result.point == 5.0
    assert result.variance == pytest.approx(2.0)
    assert math.isinf(result.df)
    assert result.ci_upper - 5.0 == pytest.approx(1.959963984540054 * math.sqrt(2.0), rel=1e-12)


def test_rubin_scaling():
    base = pool_rubin(RubinInputs([1.0, 2.5, 2.0], [0.5, 0.7, 0.6]))
    scaled = pool_rubin(RubinInputs([3.0, 7.5, 6.0], [4.5, 6.3, 5.4]))
    assert scaled.variance == pytest.approx(9.0 * base.variance, rel=1e-12)
    assert scaled.df == pytest.approx(base.df, rel=1e-12)


def test_rubin_input_validation():
    with pytest.raises(ConfigError):
        pool_rubin(RubinInputs([1.0], [1.0]))
    with pytest.raises(ConfigError):
        RubinInputs([1.0, 2.0], [1.0])
    with pytest.raises(ConfigError):
        RubinInputs([1.0, 2.0], [1.0, -1.0])


# MI then bootstrap

@pytest.mark.parametrize("row, expected", [([1.0, 3.0], 2.0), ([1.0, 2.0, 3.0], 1.0)])
def test_bootstrap_within_variances(row, expected):
    np.testing.assert_allclose(bootstrap_within_variances(mi_grid([row])), [expected])


def test_mi_boot_rubin_constant_rows_reduce_to_zero_within():
    grid = mi_grid([[1.0, 1.0, 1.0], [2.0, 2.0, 2.0], [3.0, 3.0, 3.0]], direct=[1.0, 2.0, 3.0])
    result = pool_mi_boot_rubin(grid)
    expected = pool_rubin(RubinInputs([1.0, 2.0, 3.0], [0.0, 0.0, 0.0]))
    assert result.method is Method.MI_BOOT_RUBIN
    assert result.b == 3
    assert result.variance == pytest.approx(expected.variance, rel=1e-12)
    assert result.df == pytest.approx(expected.df, rel=1e-12)


def test_mi_boot_rubin_uses_direct_estimates():
    grid = mi_grid([[1.0, 3.0], [2.0, 6.0]], direct=[2.5, 3.5])
    result = pool_mi_boot_rubin(grid)
    assert result.point == pytest.approx(3.0)
    # within = mean(2, 8) = 5; between = 0.5
    assert result.variance == pytest.approx(1.5 * 0.5 + 5.0, rel=1e-12)


def test_mi_boot_rubin_needs_direct_estimates_and_two_bootstraps():
    with pytest.raises(ConfigError):
        pool_mi_boot_rubin(mi_grid([[1.0, 2.0], [2.0, 3.0]]))
    with pytest.raises(ConfigError):
        pool_mi_boot_rubin(mi_grid([[1.0], [2.0]], direct=[1.0, 2.0]))


def test_pooled_percentile_hand_example():
    result = pool_mi_boot_pooled_percentile(mi_grid(FALLBACK))
    assert result.point == pytest.approx(2.5)
    assert result.variance == pytest.approx(1.25, rel=1e-12)
    assert result.df == 3.0
    assert (result.m, result.b) == (2, 2)


def test_pooled_percentile_constant_values():
    result = pool_mi_boot_pooled_percentile(mi_grid([[4.0, 4.0], [4.0, 4.0]]))
    assert result.ci_lower == result.ci_upper == 4.0
    assert result.variance == 0.0


def test_pooled_percentile_uses_interpolated_order_statistics():
    grid = mi_grid(np.arange(1.0, 101.0).reshape(10, 10))
    result = pool_mi_boot_pooled_percentile(grid, alpha=0.05)
    assert result.ci_lower == pytest.approx(3.475, rel=1e-12)
    assert result.ci_upper == pytest.approx(97.525, rel=1e-12)


def test_pooled_percentile_alternative_point():
    result = pool_mi_boot_pooled_percentile(mi_grid(FALLBACK), point_estimate=2.2)
    assert result.point == 2.2


# One-way ANOVA and von Hippel

def test_anova_hand_example():
    components = one_way_anova(boot_grid(EXAMPLE))
    assert components.msb == pytest.approx(2.0, rel=1e-12)
    assert components.msw == pytest.approx(0.02, rel=1e-9)
    assert components.sigma2_inf == pytest.approx(0.99, rel=1e-9)
    assert components.sigma2_btw == pytest.approx(0.02, rel=1e-9)
    assert not components.fallback_used


def test_anova_fallback():
    components = one_way_anova(boot_grid(FALLBACK))
    assert components.msb == pytest.approx(1.0)
    assert components.msw == pytest.approx(2.0)
    assert components.fallback_used
    assert components.sigma2_inf == 0.0
    assert components.sigma2_btw == pytest.approx(5.0 / 3.0, rel=1e-12)


def test_anova_identical_rows_take_the_fallback():
    components = one_way_anova(boot_grid([[2.0, 2.0], [2.0, 2.0]]))
    assert components.msb == 0.0 and components.msw == 0.0
    assert components.fallback_used
    assert components.sigma2_btw == 0.0


def test_anova_needs_two_groups_of_two():
    with pytest.raises(ConfigError):
        one_way_anova(boot_grid([[1.0, 2.0]]))
    with pytest.raises(ConfigError):
        one_way_anova(boot_grid([[1.0], [2.0]]))


def test_anova_sum_of_squares_identity():
    rng = np.random.default_rng(1)
    for _ in range(200):
        g, m = rng.integers(2, 12, size=2)
        grid = boot_grid(rng.normal(rng.normal(), rng.exponential(), size=(g, m)))
        c = one_way_anova(grid)
        total = (g * m - 1) * grid.estimates.var(ddof=1)
        assert total == pytest.approx((g - 1) * c.msb + g * (m - 1) * c.msw, rel=1e-10)


def test_von_hippel_hand_example():
    result = pool_von_hippel(boot_grid(EXAMPLE))
    assert result.point == pytest.approx(2.1, rel=1e-12)
    assert result.variance == pytest.approx(1.3233333333333333, rel=1e-9)
    assert result.df == pytest.approx(1.970, abs=5e-4)
    assert not result.fallback_used
    assert (result.m, result.b) == (2, 3)


def test_von_hippel_fallback():
    result = pool_von_hippel(boot_grid(FALLBACK))
    assert result.fallback_used
    assert result.variance == pytest.approx((5.0 / 3.0) / 4.0, rel=1e-12)
    assert result.df == 3.0


def test_von_hippel_constant_grid_has_zero_width():
    result = pool_von_hippel(boot_grid([[1.5, 1.5, 1.5], [1.5, 1.5, 1.5]]))
    assert result.variance == 0.0
    assert result.ci_lower == result.ci_upper == 1.5


def test_von_hippel_variance_forms_agree():
    rng = np.random.default_rng(2)
    checked = 0
    for _ in range(300):
        b, m = rng.integers(2, 15, size=2)
        grid = boot_grid(rng.normal(size=(b, 1)) + 0.5 * rng.normal(size=(b, m)))
        c = one_way_anova(grid)
        if c.fallback_used:
            continue
        components_form = von_hippel_variance(c, b, m)
        mean_square_form = (b + 1) / (b * m) * c.msb - c.msw / m
        expanded_form = (1 + 1 / b) * (c.msb - c.msw) / m + c.msw / (b * m)
        assert components_form == pytest.approx(mean_square_form, rel=1e-10)
        assert components_form == pytest.approx(expanded_form, rel=1e-10)
        checked += 1
    assert checked > 200


def test_satterthwaite_df_tends_to_b_minus_one():
    rng = np.random.default_rng(4)
    b, m = 12, 3
    grid = boot_grid(rng.normal(size=(b, 1)) + 1e-7 * rng.normal(size=(b, m)))
    c = one_way_anova(grid)
    assert satterthwaite_df(c, b, m) == pytest.approx(b - 1, rel=1e-6)


def test_von_hippel_needs_bootstrap_outer_grid():
    with pytest.raises(OrientationError):
        pool_von_hippel(mi_grid(EXAMPLE))


# Boot then MI percentile and normal intervals

def test_boot_mi_percentile_row_means():
    result = pool_boot_mi_percentile(boot_grid(FALLBACK))
    assert result.point == pytest.approx(2.5)
    assert result.variance == pytest.approx(0.5)
    assert result.df == 1.0
    assert result.ci_lower == pytest.approx(2.025)
    assert result.ci_upper == pytest.approx(2.975)


def test_boot_mi_percentile_constant_row_means():
    result = pool_boot_mi_percentile(boot_grid([[1.0, 3.0], [3.0, 1.0], [2.0, 2.0]]))
    assert result.ci_lower == pytest.approx(2.0) and result.ci_upper == pytest.approx(2.0)


def test_boot_mi_percentile_standard_normal_row_means():
    rng = np.random.default_rng(2000)
    result = pool_boot_mi_percentile(boot_grid(rng.standard_normal((20000, 1))))
    assert result.ci_lower == pytest.approx(-1.96, abs=0.08)
    assert result.ci_upper == pytest.approx(1.96, abs=0.08)


def test_boot_mi_normal_interval():
    result = pool_boot_mi_normal(boot_grid(EXAMPLE))
    sd = np.std([1.1, 2.1, 3.1], ddof=1)
    assert result.point == pytest.approx(2.1)
    assert math.isinf(result.df)
    assert result.ci_upper - result.point == pytest.approx(1.959963984540054 * sd, rel=1e-12)


def test_boot_mi_normal_centres_on_the_direct_point():
    grand = pool_boot_mi_normal(boot_grid(EXAMPLE))
    direct = pool_grid("boot-mi-normal", boot_grid(EXAMPLE), point_estimate=2.5)
    assert direct.point == 2.5
    assert direct.variance == grand.variance
    assert direct.ci_lower == pytest.approx(grand.ci_lower + 0.4, rel=1e-12)
    assert direct.ci_upper == pytest.approx(grand.ci_upper + 0.4, rel=1e-12)


def test_percentile_width_shrinks_with_more_imputations():
    rng = np.random.default_rng(7)
    widths_one, widths_ten = [], []
    for _ in range(2000):
        values = rng.normal(size=(200, 1)) + rng.normal(size=(200, 10))
        grid = boot_grid(values)
        ten = pool_boot_mi_percentile(grid)
        one = pool_boot_mi_percentile(grid.subgrid(200, 1))
        widths_ten.append(ten.ci_upper - ten.ci_lower)
        widths_one.append(one.ci_upper - one.ci_lower)
    assert np.mean(widths_one) > np.mean(widths_ten)


# Quantiles and dispatch

@pytest.mark.parametrize("values, q, expected", [
    ([7.0], 0.3, 7.0),
    ([1.0, 2.0, 3.0, 4.0], 0.5, 2.5),
    (list(range(1, 101)), 0.975, 97.525),
])
def test_empirical_percentile(values, q, expected):
    assert empirical_percentile(values, q) == pytest.approx(expected, rel=1e-12)


def test_quantile_argument_checks():
    with pytest.raises(DataError):
        empirical_percentile([], 0.5)
    with pytest.raises(ConfigError):
        empirical_percentile([1.0], 1.0)
    with pytest.raises(ConfigError):
        check_alpha(0.5)
    assert t_quantile(0.975, math.inf) == pytest.approx(1.959963984540054, rel=1e-12)
    assert t_quantile(0.975, 10) == pytest.approx(2.2281388519649385, rel=1e-10)


def test_pool_grid_dispatch_and_guards():
    assert pool_grid("von-hippel", boot_grid(EXAMPLE)).method is Method.VON_HIPPEL
    assert pool_grid(Method.BOOT_MI_NORMAL, boot_grid(EXAMPLE)).method is Method.BOOT_MI_NORMAL
    with pytest.raises(OrientationError):
        pool_grid("von-hippel", mi_grid(EXAMPLE))
    with pytest.raises(OrientationError):
        pool_grid("mi-boot-pooled-percentile", boot_grid(EXAMPLE))
    with pytest.raises(ConfigError):
        pool_grid("von-hippel", boot_grid(EXAMPLE), point_estimate=2.0)


def test_rubin_inputs_from_single_column_grid():
    grid = EstimateGrid(np.array([[1.0], [2.0], [3.0]]), Orientation.IMPUTATION_OUTER,
                        within_variances=np.ones((3, 1)))
    result = pool_grid("mi-rubin", grid)
    assert result.variance == pytest.approx(7.0 / 3.0, rel=1e-12)
    with pytest.raises(ConfigError):
        rubin_inputs_from_grid(mi_grid(EXAMPLE))


# Invariance properties over all poolers

def _all_pooled(values, direct):
    return [
        pool_rubin(RubinInputs(direct, np.full(direct.size, 0.3))),
        pool_mi_boot_rubin(mi_grid(values, direct=direct)),
        pool_mi_boot_pooled_percentile(mi_grid(values)),
        pool_boot_mi_percentile(boot_grid(values)),
        pool_von_hippel(boot_grid(values)),
    ]


def test_affine_equivariance():
    rng = np.random.default_rng(9)
    values = rng.normal(size=(8, 1)) + 0.5 * rng.normal(size=(8, 5))
    direct = values.mean(axis=1) + 0.1
    shift, scale = -3.0, 2.5

    base = _all_pooled(values, direct)
    moved = [
        pool_rubin(RubinInputs(shift + scale * direct, np.full(direct.size, 0.3 * scale ** 2))),
        *_all_pooled(shift + scale * values, shift + scale * direct)[1:],
    ]
    for a, b in zip(base, moved):
        assert b.point == pytest.approx(shift + scale * a.point, rel=1e-9, abs=1e-12)
        assert b.variance == pytest.approx(scale ** 2 * a.variance, rel=1e-9)
        assert b.df == pytest.approx(a.df, rel=1e-9)
        assert b.ci_lower == pytest.approx(shift + scale * a.ci_lower, rel=1e-9, abs=1e-12)
        assert b.ci_upper == pytest.approx(shift + scale * a.ci_upper, rel=1e-9, abs=1e-12)


def test_permutation_invariance():
    rng = np.random.default_rng(10)
    values = rng.normal(size=(8, 1)) + 0.5 * rng.normal(size=(8, 5))
    direct = values.mean(axis=1)
    rows = rng.permutation(8)
    permuted = rng.permuted(values[rows], axis=1)

    for a, b in zip(_all_pooled(values, direct), _all_pooled(permuted, direct[rows])):
        assert b.point == pytest.approx(a.point, rel=1e-12)
        assert b.variance == pytest.approx(a.variance, rel=1e-10)
        assert b.ci_lower == pytest.approx(a.ci_lower, rel=1e-10)
        assert b.ci_upper == pytest.approx(a.ci_upper, rel=1e-10)


# Brute-force oracles on random grids

def _brute_anova(rows):
    g, m = len(rows), len(rows[0])
    row_means = [sum(r) / m for r in rows]
    grand = sum(row_means) / g
    msb = m * sum((x - grand) ** 2 for x in row_means) / (g - 1)
    msw = sum((v - mu) ** 2 for r, mu in zip(rows, row_means) for v in r) / (g * (m - 1))
    return grand, msb, msw


def test_oracle_equivalence_on_random_grids():
    rng = np.random.default_rng(12)
    for _ in range(1000):
        b, m = (int(k) for k in rng.integers(2, 8, size=2))
        values = rng.normal(size=(b, 1)) * rng.exponential() + rng.normal(size=(b, m))
        rows = values.tolist()

        grand, msb, msw = _brute_anova(rows)
        c = one_way_anova(boot_grid(values))
        assert c.msb == pytest.approx(msb, rel=1e-10)
        assert c.msw == pytest.approx(msw, rel=1e-10)

        result = pool_von_hippel(boot_grid(values))
        if msb > msw:
            variance = (b + 1) / (b * m) * msb - msw / m
        else:
            flat = [v for r in rows for v in r]
            variance = sum((v - grand) ** 2 for v in flat) / (len(flat) - 1) / (b * m)
        assert result.point == pytest.approx(grand, rel=1e-10, abs=1e-14)
        assert result.variance == pytest.approx(variance, rel=1e-10, abs=1e-12)

        estimates, within = rows[0], [abs(v) for v in rows[-1]]
        k = len(estimates)
        mean = sum(estimates) / k
        between = sum((e - mean) ** 2 for e in estimates) / (k - 1)
        rubin = pool_rubin(RubinInputs(estimates, within))
        assert rubin.variance == pytest.approx((1 + 1 / k) * between + sum(within) / k, rel=1e-10)


def test_pooled_variance_expectation_under_random_effects():
    rng = np.random.default_rng(13)
    m, b, sigma_u, sigma_e = 3, 4, 1.0, 0.5
    draws = np.array([
        pool_mi_boot_pooled_percentile(
            mi_grid(sigma_u * rng.normal(size=(m, 1)) + sigma_e * rng.normal(size=(m, b)))
        ).variance
        for _ in range(20000)
    ])
    expected = (m - 1) / m * sigma_u ** 2 + (m * b - 1) / (m * b) * sigma_e ** 2
    assert abs(draws.mean() - expected) < 3 * draws.std(ddof=1) / np.sqrt(draws.size)
