import math

import numpy
import pandas
import pytest

import plugins.errors
import plugins.growth_accounting as ga
import plugins.panel_store

SHARES = ga.FactorShares(0.57, 0.43, 0.30)
CHANNEL_LEAVES = {
    "oil_gdp": -8.149,
    "oil_price": -12.74,
    "oil_production": -17.3,
    "credit_loss": -2.84,
    "tfp_sanctions": -18.7,
    "tfp_other": -4.8,
    "factor_sanctions": -5.6,
    "factor_other": -1.4,
}
ROUNDED_LEAVES = {
    "oil_gdp": -8.1, "oil_price": -12.7, "oil_production": -17.3, "credit_loss": -2.8,
    "tfp_sanctions": -18.7, "tfp_other": -4.8, "factor_sanctions": -5.6, "factor_other": -1.4,
}
# Depth-first node values of the published channel table
TABLE_NODES = [-71.5, -8.1, -4.1, -4.1, -63.4, -32.9, -30.0, -12.7, -17.3, -8.7, -8.6, -2.8, -23.5, -18.7, -4.8, -7.0, -5.6, -1.4]


def test_conventional_pre_collapse_row():
    d = ga.decompose_conventional(ga.PeriodGrowthRates("1998-2012", 2.7, 2.3, 4.3, 7.1), SHARES)
    assert d.contributions["capital"] == pytest.approx(1.3, abs=0.15)
    assert d.contributions["human_capital"] == pytest.approx(1.9, abs=0.15)
    assert d.contributions["tfp"] == pytest.approx(-0.5, abs=0.15)


@pytest.mark.parametrize(
    "rates, imports, tfp",
    [(("2012-2020", -17.0, -3.4, 0.3, -29.2), -8.8, -6.3), (("2016-2020", -27.0, -6.2, -1.4, -23.1), -7.0, -15.9)],
)
def test_import_adjusted_rows(rates, imports, tfp):
    r = ga.PeriodGrowthRates(*rates)
    adjusted = ga.decompose_import_adjusted(ga.decompose_conventional(r, SHARES), r, SHARES)
    assert adjusted.contributions["imports"] == pytest.approx(imports, abs=0.15)
    assert adjusted.contributions["tfp"] == pytest.approx(tfp, abs=0.15)


def test_zero_growth_has_no_percentages():
    r = ga.PeriodGrowthRates("flat", 0.0, 0.0, 0.0, 0.0)
    conv = ga.decompose_conventional(r, SHARES)
    assert set(conv.contributions.values()) == {0.0}
    assert set(conv.percentage_contributions.values()) == {None}
    adjusted = ga.decompose_import_adjusted(conv, r, SHARES)
    assert adjusted.contributions["tfp"] == conv.contributions["tfp"]


def test_equal_factor_growth_leaves_no_tfp():
    conv = ga.decompose_conventional(ga.PeriodGrowthRates("even", 10, 10, 10, 0), ga.FactorShares(0.5, 0.5))
    assert conv.contributions["tfp"] == 0
    assert conv.percentage_contributions == {"capital": 50, "human_capital": 50, "tfp": 0}


def test_decompositions_always_add_up():
    rng = numpy.random.default_rng(5)
    for _ in range(200):
        g = rng.uniform(-30, 30, size=4)
        shares = ga.FactorShares(float(rng.uniform(0.05, 0.6)), float(rng.uniform(0.05, 0.4)), float(rng.uniform(0.05, 0.9)))
        r = ga.PeriodGrowthRates("random", *map(float, g))
        conv = ga.decompose_conventional(r, shares)
        adjusted = ga.decompose_import_adjusted(conv, r, shares)
        assert math.fsum(conv.contributions.values()) == pytest.approx(r.g_Y, abs=1e-12)
        assert math.fsum(adjusted.contributions.values()) == pytest.approx(r.g_Y, abs=1e-12)


def test_factor_share_domain():
    with pytest.raises(plugins.errors.DomainError):
        ga.FactorShares(1.2, 0.3)
    with pytest.raises(plugins.errors.DomainError):
        ga.FactorShares(0.7, 0.6)


def test_period_rates_from_levels():
    series = pandas.DataFrame(
        {"gdp": [100.0, 100 * math.e ** 0.2], "capital": [1.0, 1.0], "human_capital": [1.0, 1.0], "imports": [5.0, 5.0]},
        index=[2010, 2020],
    )
    rates = ga.period_rates(series, "decade", 2010, 2020)
    assert rates.g_Y == pytest.approx(2.0)
    assert rates.g_K == 0
    with pytest.raises(plugins.errors.RangeError):
        ga.period_rates(series, "late", 2010, 2021)
    with pytest.raises(plugins.errors.OrderingError):
        ga.period_rates(series, "backwards", 2020, 2010)


def test_period_rates_reject_bad_levels():
    series = pandas.DataFrame(
        {"gdp": [100.0, 120.0], "capital": [1.0, 0.0], "human_capital": [1.0, 1.0], "imports": ["5", "x"]},
        index=[2010, 2020],
    )
    with pytest.raises(plugins.errors.DomainError, match="capital"):
        ga.period_rates(series, "decade", 2010, 2020)
    series["capital"] = [1.0, 2.0]
    with pytest.raises(plugins.errors.ParseError) as e:
        ga.period_rates(series, "decade", 2010, 2020)
    assert (e.value.row, e.value.column) == (2020, "imports")



def test_decomposition_table_layout():
    r = ga.PeriodGrowthRates("1998-2012", 2.7, 2.3, 4.3, 7.1)
    conv = ga.decompose_conventional(r, SHARES)
    frame = ga.decomposition_frame([(r, conv, ga.decompose_import_adjusted(conv, r, SHARES))])
    assert list(frame["row"]) == ["Growth", "Contribution", "Percentage Contribution"]
    assert frame.loc[1, "Imports"] == pytest.approx(2.13)


def test_channel_table_nodes_and_aggregates():
    root = ga.channel_decompose(CHANNEL_LEAVES)
    values = [node.value for _, node in root.walk()]
    assert len(values) == len(TABLE_NODES)
    for value, shown in zip(values, TABLE_NODES):
        assert abs(value - shown) <= 0.05 + 1e-9
    aggregates = ga.channel_aggregates(root)
    assert abs(aggregates["sanctions"] - -39.9) <= 0.05
    assert abs(aggregates["other"] - -31.6) <= 0.05
    assert abs(aggregates["total"] - -71.5) <= 0.05


def test_rounded_leaves_stay_within_display_tolerance():
    aggregates = ga.channel_aggregates(ga.channel_decompose(ROUNDED_LEAVES))
    assert aggregates["sanctions"] == pytest.approx(-39.9, abs=0.15)
    assert aggregates["other"] == pytest.approx(-31.6, abs=0.15)
    assert aggregates["total"] == pytest.approx(-71.5, abs=0.15)


def test_oil_gdp_split_at_sanctions_share():
    root = ga.channel_decompose(ROUNDED_LEAVES, sanctions_share=0.503)
    oil = root.children[0]
    assert [c.value for c in oil.children] == pytest.approx([-4.0743, -4.0257])


def test_every_parent_is_the_sum_of_its_children():
    rng = numpy.random.default_rng(17)
    for _ in range(100):
        leaves = {key: float(rng.uniform(-30, 5)) for key in CHANNEL_LEAVES}
        root = ga.channel_decompose(leaves, sanctions_share=float(rng.uniform(0.01, 0.99)))
        for _, node in root.walk():
            if node.children:
                assert math.fsum(c.value for c in node.children) == pytest.approx(node.value, abs=1e-12)
        aggregates = ga.channel_aggregates(root)
        assert aggregates["sanctions"] + aggregates["other"] == pytest.approx(aggregates["total"], abs=1e-9)


def test_zero_leaves_give_zero_tree():
    root = ga.channel_decompose({key: 0 for key in CHANNEL_LEAVES})
    assert all(node.value == 0 for _, node in root.walk())
    assert all(pct is None for _, _, _, pct in ga.channel_shares(root))


def test_unmatched_leaf_names_are_listed():
    leaves = dict(CHANNEL_LEAVES, oil_prize=-1.0)
    del leaves["oil_price"]
    with pytest.raises(plugins.errors.StructureError) as e:
        ga.channel_decompose(leaves)
    assert e.value.unmatched == ["oil_price", "oil_prize"]


def test_sanctions_share_domain():
    with pytest.raises(plugins.errors.DomainError):
        ga.channel_decompose(CHANNEL_LEAVES, sanctions_share=1.0)


def test_non_numeric_leaf_is_a_domain_error():
    with pytest.raises(plugins.errors.DomainError, match="tfp_other"):
        ga.channel_decompose(dict(CHANNEL_LEAVES, tfp_other="lots"))
    with pytest.raises(plugins.errors.DomainError, match="tfp_other"):
        ga.channel_decompose(dict(CHANNEL_LEAVES, tfp_other=float("nan")))


def test_default_tree_comes_from_the_shipped_schema(tmp_path):
    tree = ga.load_channel_tree()
    assert tree["name"] == "Change in per capita GDP"
    assert [c["name"] for c in tree["children"]] == ["Oil GDP", "Non-oil GDP"]
    default = ga.channel_decompose(CHANNEL_LEAVES)
    explicit = ga.channel_decompose(CHANNEL_LEAVES, tree)
    assert [(n.name, n.value) for _, n in default.walk()] == [(n.name, n.value) for _, n in explicit.walk()]
    bad = tmp_path / "tree.yaml"
    bad.write_text("- just a list\n")
    with pytest.raises(plugins.errors.ConfigError):
        ga.load_channel_tree(str(bad))


def test_channel_table_ends_with_aggregates():
    frame = ga.channel_frame(ga.channel_decompose(CHANNEL_LEAVES))
    assert frame["concept"].iloc[0] == "Change in per capita GDP"
    assert frame["concept"].iloc[-4] == "Aggregates"
    assert frame["percentage_contribution"].iloc[-2] == pytest.approx(55.8, abs=0.05)


@pytest.mark.parametrize("a, b, expected", [([0.30, 0.40], [0.60, 0.70], 0.50), ([0.5], [0.5], 0.5)])
def test_sanctions_production_share(a, b, expected):
    assert ga.sanctions_production_share(a, b) == pytest.approx(expected)


def test_sanctions_production_share_needs_both_groups():
    with pytest.raises(plugins.errors.DomainError):
        ga.sanctions_production_share([], [0.5])


def test_collapse_metrics_halving_twice():
    m = ga.collapse_metrics({2000: 100, 2001: 50, 2002: 25}, 2000, 2002)
    assert m.trough_to_peak == pytest.approx(-75)
    assert m.avg_annual_decline == pytest.approx(-50)
    assert m.cumulative_loss == pytest.approx(-125)
    assert m.mean_annual_change == pytest.approx(-50)


def test_collapse_metrics_venezuela_ratio():
    series = {2012 + t: 100 * (0.285 ** (t / 8)) for t in range(9)}
    m = ga.collapse_metrics(series, 2012, 2020)
    assert m.trough_to_peak == pytest.approx(-71.5)
    assert m.years == 8
    assert m.avg_annual_decline == pytest.approx((0.285 ** (1 / 8) - 1) * 100)


def test_constant_series_has_no_collapse():
    m = ga.collapse_metrics({y: 7.0 for y in range(2000, 2005)}, 2000, 2004)
    assert (m.trough_to_peak, m.avg_annual_decline, m.cumulative_loss) == (0, 0, 0)
    with pytest.raises(plugins.errors.OrderingError):
        ga.collapse_metrics({2000: 1, 2001: 1}, 2001, 2000)
    with pytest.raises(plugins.errors.GapError):
        ga.collapse_metrics({2000: 1, 2002: 1}, 2000, 2002)


def _brute_force(values):
    best = None
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            ratio = values[j] / values[i]
            if ratio < 1 and (best is None or ratio < best[2]):
                best = (i, j, ratio)
    return best


def test_deepest_decline_matches_exhaustive_scan():
    rng = numpy.random.default_rng(23)
    for _ in range(200):
        values = rng.uniform(1, 100, size=int(rng.integers(2, 81)))
        found = ga.deepest_decline(values)
        expected = _brute_force(list(values))
        if expected is None:
            assert found is None
        else:
            assert found[:2] == expected[:2]
            assert found[2] == pytest.approx(expected[2])


def test_deepest_decline_ties_go_to_earliest_pair():
    assert ga.deepest_decline(numpy.array([10.0, 5.0, 10.0, 5.0]))[:2] == (0, 1)
    assert ga.deepest_decline(numpy.array([1.0, 2.0, 3.0])) is None


def _panel(paths):
    return plugins.panel_store.CountryPanel(
        plugins.panel_store.CountryYearObservation(c, 2000 + i, v, 1.0, 0.0)
        for c, values in paths.items()
        for i, v in enumerate(values)
    )


def test_rank_collapses_orders_by_decline_and_counts_peacetime():
    panel = _panel({"AAA": [100, 50, 60], "BBB": [100, 90, 20], "CCC": [1, 2, 3]})
    rows = ga.rank_collapses(panel, {"AAA": "Peacetime", "BBB": "War"}, top_k=5)
    assert [r.country for r in rows] == ["BBB", "AAA"]
    assert [r.metrics.trough_to_peak for r in rows] == pytest.approx([-80, -50])
    assert [r.peacetime_rank for r in rows] == [None, 1]
    frame = ga.collapse_frame(rows)
    assert list(frame["period"]) == ["2000-2002", "2000-2001"]
    assert ga.rank_collapses(panel, {}, top_k=1)[0].country == "BBB"


def test_rank_collapses_matches_exhaustive_scan():
    rng = numpy.random.default_rng(29)
    for _ in range(20):
        paths = {f"C{c:02d}": list(rng.uniform(1, 100, size=int(rng.integers(2, 81)))) for c in range(int(rng.integers(1, 12)))}
        expected = []
        for country, values in paths.items():
            best = _brute_force(values)
            if best is not None:
                expected.append(((best[2] - 1) * 100, country, 2000 + best[0], 2000 + best[1]))
        expected.sort(key=lambda item: (item[0], item[1]))
        rows = ga.rank_collapses(_panel(paths), {})
        assert [(r.country, r.peak_year, r.trough_year) for r in rows] == [(c, p, t) for _, c, p, t in expected]
        assert [r.metrics.trough_to_peak for r in rows] == pytest.approx([d for d, *_ in expected])
        assert [r.rank for r in rows] == list(range(1, len(rows) + 1))
