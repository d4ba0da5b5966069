import io
import math

import numpy
import pytest

import plugins.errors
import plugins.panel_store as ps

TAG = ps.SourceTag


def _csv(text: str) -> io.StringIO:
    return io.StringIO(text.strip() + "\n")


def _stocks(tag, rows):
    return [ps.MigrantStockRecord(d, y, s, tag) for d, y, s in rows]


def test_header_only_stream_gives_empty_panel():
    panel = ps.load_country_panel(_csv("country,year,gdp_pc,population,net_migration"))
    assert len(panel) == 0


def test_panel_rows_come_back_in_year_order():
    panel = ps.load_country_panel(_csv("""
country,year,gdp_pc,population,net_migration
VEN,2013,80,30000000,-10
VEN,2011,100,29000000,-10
VEN,2012,90,29500000,-10
"""))
    assert [o.year for o in panel] == [2011, 2012, 2013]
    assert panel.gdp_series("VEN") == {2011: 100.0, 2012: 90.0, 2013: 80.0}


def test_duplicate_country_year_is_rejected():
    with pytest.raises(plugins.errors.DuplicateKeyError):
        ps.load_country_panel(_csv("""
country,year,gdp_pc,population,net_migration
VEN,2012,100,1,0
VEN,2012,90,1,0
"""))


def test_schema_map_and_missing_column():
    text = "iso,yr,rgdp,pop,netmig\nCOL,2010,5,10,1\n"
    schema = {"country": "iso", "year": "yr", "gdp_pc": "rgdp", "population": "pop", "net_migration": "netmig"}
    panel = ps.load_country_panel(io.StringIO(text), schema)
    assert panel.countries() == ["COL"]
    with pytest.raises(plugins.errors.SchemaError) as e:
        ps.load_country_panel(io.StringIO(text))
    assert e.value.column == "country"


def test_non_numeric_cell_reports_row_and_column():
    with pytest.raises(plugins.errors.ParseError) as e:
        ps.load_country_panel(_csv("""
country,year,gdp_pc,population,net_migration
VEN,2011,100,1,0
VEN,2012,abc,1,0
"""))
    assert e.value.row == 3
    assert e.value.column == "gdp_pc"


def test_empty_and_non_positive_gdp_are_absent(capsys):
    panel = ps.load_country_panel(_csv("""
country,year,gdp_pc,population,net_migration
VEN,2011,,1,0
VEN,2012,-4,1,0
VEN,2013,7,1,0
"""))
    assert [o.gdp_pc for o in panel] == [None, None, 7.0]
    assert "Marked 1 non-positive" in capsys.readouterr().out


def test_year_and_population_domain():
    with pytest.raises(plugins.errors.RangeError):
        ps.CountryYearObservation("VEN", 1949, 1.0, 1.0, 0.0)
    with pytest.raises(plugins.errors.DomainError):
        ps.CountryYearObservation("VEN", 2000, 1.0, 0.0, 0.0)


def test_written_panel_reloads_at_same_precision():
    rng = numpy.random.default_rng(7)
    observations = [
        ps.CountryYearObservation(c, y, float(rng.uniform(100, 1e5)), float(rng.uniform(1e5, 1e8)), float(rng.normal(0, 1e4)))
        for c in ("ARG", "COL", "VEN")
        for y in range(2000, 2010)
    ]
    panel = ps.CountryPanel(observations)
    stream = io.StringIO()
    ps.write_panel(panel, stream, precision=6)
    reloaded = ps.load_country_panel(io.StringIO(stream.getvalue()))
    assert len(reloaded) == len(panel)
    for a, b in zip(panel, reloaded):
        assert (a.country_code, a.year) == (b.country_code, b.year)
        assert b.gdp_pc == pytest.approx(a.gdp_pc, abs=1e-6)
        assert b.net_migration == pytest.approx(a.net_migration, abs=1e-6)


@pytest.mark.parametrize(
    "stocks, flows",
    [
        ([(2015, 100), (2016, 100), (2017, 100)], [(2016, 0), (2017, 0)]),
        ([(2015, 100), (2016, 150), (2017, 210)], [(2016, 50), (2017, 60)]),
    ],
)
def test_stocks_to_flows(stocks, flows):
    assert ps.stocks_to_flows(stocks) == flows


def test_stocks_to_flows_telescopes():
    rng = numpy.random.default_rng(11)
    for _ in range(50):
        values = rng.integers(0, 10**6, size=int(rng.integers(2, 20)))
        stocks = [(2000 + i, int(v)) for i, v in enumerate(values)]
        flows = ps.stocks_to_flows(stocks)
        assert sum(f for _, f in flows) == stocks[-1][1] - stocks[0][1]


def test_stocks_to_flows_errors():
    with pytest.raises(plugins.errors.GapError) as e:
        ps.stocks_to_flows([(2015, 1), (2017, 2)])
    assert e.value.missing_year == 2016
    with pytest.raises(plugins.errors.OrderingError):
        ps.stocks_to_flows([(2016, 1), (2015, 2)])


@pytest.mark.parametrize(
    "args, expected",
    [((0.20, 0.20, 0.30), 0.30), ((0.10, 0.20, 0.30), 0.15), ((-0.05, 0.20, 0.10), -0.025)],
)
def test_proportional_growth_extrapolation(args, expected):
    assert ps.proportional_growth_extrapolation(*args) == pytest.approx(expected)


def test_proportional_growth_scales_with_reference_future():
    rng = numpy.random.default_rng(11)
    for _ in range(200):
        own, ref_hist, ref_future = rng.uniform(-1, 2, size=3)
        if abs(ref_hist) < 1e-3:
            continue
        k = rng.uniform(0.1, 10)
        scaled = ps.proportional_growth_extrapolation(own, ref_hist, k * ref_future)
        assert scaled == pytest.approx(k * ps.proportional_growth_extrapolation(own, ref_hist, ref_future), rel=1e-12, abs=1e-12)


def test_proportional_growth_needs_reference_growth():
    with pytest.raises(plugins.errors.UndefinedRatioError):
        ps.proportional_growth_extrapolation(0.1, 0.0, 0.2)


@pytest.mark.parametrize(
    "left, right, target, expected",
    [((2015, 100), (2017, 300), 2016, 200), ((2015, 100), (2019, 100), 2017, 100), ((2015, 120), (2018, 180), 2016, 140)],
)
def test_interpolate_gap_years(left, right, target, expected):
    assert ps.interpolate_gap_years(left, right, target) == pytest.approx(expected)


def test_interpolate_gap_years_stays_between_endpoints():
    rng = numpy.random.default_rng(3)
    for _ in range(100):
        a, b = rng.uniform(0, 1e6, size=2)
        value = ps.interpolate_gap_years((2010, a), (2020, b), int(rng.integers(2011, 2020)))
        assert min(a, b) - 1e-6 <= value <= max(a, b) + 1e-6
    with pytest.raises(plugins.errors.RangeError):
        ps.interpolate_gap_years((2015, 1), (2017, 2), 2017)


def test_monthly_stocks_use_december_or_adjacent_months(capsys):
    rows = [
        ("COL", "2018-12", 1000), ("COL", "2019-11", 1400), ("COL", "2020-01", 1600),
        ("PER", "2018-06", 500),
    ]
    records = {(r.destination_code, r.year): r.stock for r in ps.annualize_monthly_stocks(rows)}
    assert records[("COL", 2018)] == 1000
    assert records[("COL", 2019)] == pytest.approx(1500)
    assert records[("COL", 2020)] == 1600
    assert records[("PER", 2018)] == 500
    assert "Interpolated 3" in capsys.readouterr().out


def test_stock_loader_reads_monthly_snapshots():
    records = ps.load_stock_records(_csv("destination,date,stock\nCOL,2019-12-01,1800000\nCOL,2018-12-01,1100000"), TAG.R4V)
    assert [(r.year, r.stock) for r in records] == [(2018, 1100000.0), (2019, 1800000.0)]


def test_constant_stocks_give_zero_flows():
    un = _stocks(TAG.UN_STOCK, [("COL", y, 500) for y in range(2010, 2016)])
    r4v = _stocks(TAG.R4V, [("COL", y, 500) for y in range(2017, 2020)])
    series = ps.build_emigration_series(un, r4v, [], [], ["COL"])
    assert series.years == list(range(2011, 2020))
    assert all(v == 0 for v in series.flows.values())


def test_uncovered_destination_grows_proportionally():
    un = _stocks(TAG.UN_STOCK, [("COL", y, 50 + 10 * (y - 2010)) for y in range(2010, 2016)])
    un += _stocks(TAG.UN_STOCK, [("ESP", y, 75 + 5 * (y - 2010)) for y in range(2010, 2016)])
    r4v = _stocks(TAG.R4V, [("COL", 2017, 120)])
    series = ps.build_emigration_series(un, r4v, [], [], ["COL"])
    # COL: 50 -> 100 (hist growth 1.0), ESP: 75 -> 100 (hist growth 1/3); future covered growth 0.2
    esp_2017 = 100 * (1 + 0.2 * (1 / 3) / 1.0)
    stock_2015 = 200
    stock_2017 = 120 + esp_2017
    stock_2016 = (stock_2015 + stock_2017) / 2
    assert series.flows[2016] == pytest.approx(stock_2016 - stock_2015)
    assert series.flows[2017] == pytest.approx(stock_2017 - stock_2016)
    assert series.total() == pytest.approx(stock_2017 - 125)


def test_equal_base_uncovered_destination_reaches_110():
    un = _stocks(TAG.UN_STOCK, [("COL", 2010, 50), ("COL", 2015, 100), ("ESP", 2010, 200 / 3), ("ESP", 2015, 100)])
    r4v = _stocks(TAG.R4V, [("COL", 2017, 120)])
    series = ps.build_emigration_series(un, r4v, [], [], ["COL"])
    # ESP grew 50% while COL doubled: ESP 2017 = 100 * (1 + 0.2 * 0.5) = 110
    flows = series.flows
    stock_2015 = 200
    assert stock_2015 + flows[2016] + flows[2017] == pytest.approx(230)


def test_several_uncovered_destinations_follow_covered_aggregate_only():
    un = _stocks(TAG.UN_STOCK, [(d, y, 50 + 10 * (y - 2010)) for d in ("COL", "ESP", "ITA") for y in range(2010, 2016)])
    r4v = _stocks(TAG.R4V, [("COL", 2017, 120)])
    series = ps.build_emigration_series(un, r4v, [], [], ["COL"])
    # every destination doubled like COL, so each reaches COL's 120
    assert 300 + series.flows[2016] + series.flows[2017] == pytest.approx(360)
    assert series.total() == pytest.approx(360 - 150)


def test_uncovered_extrapolation_ignores_destination_order():
    growth = {"AAA": 4, "MMM": 6, "ZZZ": 8}
    rows = [("COL", y, 50 + 10 * (y - 2010)) for y in range(2010, 2016)]
    rows += [(d, y, 40 + step * (y - 2010)) for d, step in growth.items() for y in range(2010, 2016)]
    r4v = _stocks(TAG.R4V, [("COL", 2017, 130), ("COL", 2018, 150)])
    series = ps.build_emigration_series(_stocks(TAG.UN_STOCK, rows), r4v, [], [], ["COL"])
    expected_2018 = 150 + sum((40 + 5 * step) * (1 + 0.5 * (5 * step / 40) / 1.0) for step in growth.values())
    stock_2015 = 100 + sum(40 + 5 * step for step in growth.values())
    assert stock_2015 + sum(series.flows[y] for y in (2016, 2017, 2018)) == pytest.approx(expected_2018)


def test_survey_sources_fill_their_destinations():
    un = _stocks(TAG.UN_STOCK, [(d, y, 10) for d in ("COL", "USA", "ESP") for y in range(2010, 2016)])
    r4v = _stocks(TAG.R4V, [("COL", 2017, 20)])
    acs = _stocks(TAG.ACS, [("USA", 2017, 30)])
    ine = _stocks(TAG.INE, [("ESP", 2017, 40)])
    series = ps.build_emigration_series(un, r4v, acs, ine, ["COL"])
    assert series.total() == pytest.approx(90 - 30)


def test_missing_r4v_destination_is_named():
    un = _stocks(TAG.UN_STOCK, [("COL", 2010, 1), ("COL", 2015, 2), ("PER", 2010, 1), ("PER", 2015, 2)])
    r4v = _stocks(TAG.R4V, [("COL", 2017, 3)])
    with pytest.raises(plugins.errors.MissingSourceError) as e:
        ps.build_emigration_series(un, r4v, [], [], ["COL", "PER"])
    assert e.value.destinations == ["PER"]


def test_empty_un_baseline_cannot_be_extrapolated():
    with pytest.raises(plugins.errors.ExtrapolationError):
        ps.build_emigration_series([], _stocks(TAG.R4V, [("COL", 2017, 3)]), [], [], ["COL"])


def test_splice_compounds_growth_from_last_level():
    panel = ps.CountryPanel([
        ps.CountryYearObservation("VEN", 2018, 100.0, 1.0, 0.0),
        ps.CountryYearObservation("VEN", 2019, None, 1.0, 0.0),
        ps.CountryYearObservation("VEN", 2020, None, 1.0, 0.0),
        ps.CountryYearObservation("COL", 2019, None, 1.0, 0.0),
    ])
    spliced = ps.splice_growth_rates(panel, "VEN", {2019: -10.0, 2020: -20.0})
    assert spliced.gdp_series("VEN") == pytest.approx({2018: 100.0, 2019: 90.0, 2020: 72.0})
    assert spliced.gdp_series("COL") == {}


def test_net_migration_series_is_emigration_positive():
    panel = ps.CountryPanel([
        ps.CountryYearObservation("VEN", 2018, 1.0, 1.0, -700.0),
        ps.CountryYearObservation("VEN", 2019, 1.0, 1.0, 200.0),
    ])
    series = ps.net_migration_series(panel, "VEN", "WDI")
    assert series.flows == {2018: 700.0, 2019: -200.0}
    frame = ps.series_frame([series])
    assert list(frame.columns) == ["year", "flow_persons", "source_label"]
    assert math.isclose(frame["flow_persons"].sum(), 500.0)
