"""Panel ingestion and the harmonized Venezuelan emigration series.

   Country-year panels (GDP per capita, population, net migration) are read from CSV through a
   logical -> physical column map. Migrant stock tables (UN migrant stock, R4V, ACS, INE) are assembled
   into one stock path per destination and differenced into yearly emigration flows.
"""
import dataclasses
import datetime
import enum
import math
import typing

import dateutil.parser
import pandas

import plugins.errors

PANEL_COLUMNS = ("country", "year", "gdp_pc", "population", "net_migration")
YEAR_RANGE = (1950, 2035)
UN_BASE_YEARS = (2010, 2015)
FIRST_SURVEY_YEAR = 2017
GAP_YEAR = 2016
MONTH_DEFAULT = datetime.datetime(2000, 1, 1)


class SourceTag(enum.Enum):
    UN_STOCK = "UN_STOCK"
    R4V = "R4V"
    ACS = "ACS"
    INE = "INE"
    EXTRAPOLATED = "EXTRAPOLATED"


@dataclasses.dataclass(frozen=True)
class CountryYearObservation:
    country_code: str
    year: int
    gdp_pc: typing.Optional[float]
    population: float
    net_migration: float

    def __post_init__(self):
        if not YEAR_RANGE[0] <= self.year <= YEAR_RANGE[1]:
            raise plugins.errors.RangeError(
                f"Year {self.year} for {self.country_code} outside {YEAR_RANGE[0]}-{YEAR_RANGE[1]}"
            )
        if not self.population > 0:
            raise plugins.errors.DomainError(
                f"Population must be positive ({self.country_code} {self.year}: {self.population})"
            )


@dataclasses.dataclass(frozen=True)
class MigrantStockRecord:
    destination_code: str
    year: int
    stock: float
    source_tag: SourceTag

    def __post_init__(self):
        if self.stock < 0:
            raise plugins.errors.DomainError(
                f"Negative migrant stock for {self.destination_code} {self.year}: {self.stock}"
            )


@dataclasses.dataclass(frozen=True)
class EmigrationSeries:
    label: str
    flows: typing.Dict[int, float]

    def __post_init__(self):
        years = sorted(self.flows)
        for previous, year in zip(years, years[1:]):
            if year != previous + 1:
                raise plugins.errors.GapError(previous + 1, f"emigration series '{self.label}'")

    @property
    def years(self) -> typing.List[int]:
        return sorted(self.flows)

    def total(self) -> float:
        return math.fsum(self.flows.values())


class CountryPanel:
    """Immutable, (country, year)-sorted collection of observations"""

    observations: typing.Tuple[CountryYearObservation, ...]

    def __init__(self, observations: typing.Iterable[CountryYearObservation]):
        ordered = sorted(observations, key=lambda o: (o.country_code, o.year))
        for previous, current in zip(ordered, ordered[1:]):
            if (previous.country_code, previous.year) == (current.country_code, current.year):
                raise plugins.errors.DuplicateKeyError((current.country_code, current.year))
        self.observations = tuple(ordered)

    def __len__(self):
        return len(self.observations)

    def __iter__(self):
        return iter(self.observations)

    def __repr__(self):
        return f"CountryPanel<{len(self.observations)} observations, {len(self.countries())} countries>"

    def countries(self) -> typing.List[str]:
        return sorted({o.country_code for o in self.observations})

    def for_country(self, country: str) -> typing.List[CountryYearObservation]:
        return [o for o in self.observations if o.country_code == country]

    def gdp_series(self, country: str) -> typing.Dict[int, float]:
        """Year -> gdp_pc for the years where gdp_pc is present"""
        return {o.year: o.gdp_pc for o in self.for_country(country) if o.gdp_pc is not None}

    def to_frame(self) -> pandas.DataFrame:
        return pandas.DataFrame(
            [
                (o.country_code, o.year, o.gdp_pc, o.population, o.net_migration)
                for o in self.observations
            ],
            columns=list(PANEL_COLUMNS),
        )


def _number(text: str, row: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise plugins.errors.ParseError(row, column, text)
    if not math.isfinite(value):
        raise plugins.errors.ParseError(row, column, text)
    return value


def _year(text: str, row: int, column: str) -> int:
    value = _number(text, row, column)
    if not value.is_integer():
        raise plugins.errors.ParseError(row, column, text)
    return int(value)


def _read_text_frame(source: typing.TextIO) -> pandas.DataFrame:
    try:
        frame = pandas.read_csv(source, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pandas.errors.EmptyDataError:
        raise plugins.errors.SchemaError("header row")
    frame.columns = [str(c).strip() for c in frame.columns]
    return frame


def load_country_panel(source: typing.TextIO, schema: typing.Optional[typing.Dict[str, str]] = None) -> CountryPanel:
    """Parses a country-year CSV into a CountryPanel.

    :param source: Text stream with a header row
    :param schema: Map of logical column (country, year, gdp_pc, population, net_migration) to the
                   physical header name. Unmapped columns keep their logical name.
    :return: Panel sorted by (country, year). Empty gdp_pc cells are kept as absent.
    """
    schema = schema or {}
    frame = _read_text_frame(source)
    physical = {logical: schema.get(logical, logical) for logical in PANEL_COLUMNS}
    for logical in PANEL_COLUMNS:
        if physical[logical] not in frame.columns:
            raise plugins.errors.SchemaError(physical[logical])

    observations = []
    seen = set()
    non_positive = 0
    # Line 1 is the header, so data row i sits on line i + 2
    for i, record in enumerate(frame.to_dict("records")):
        line = i + 2
        country = record[physical["country"]].strip()
        year = _year(record[physical["year"]], line, physical["year"])
        if (country, year) in seen:
            raise plugins.errors.DuplicateKeyError((country, year))
        seen.add((country, year))
        gdp_text = record[physical["gdp_pc"]].strip()
        gdp_pc = _number(gdp_text, line, physical["gdp_pc"]) if gdp_text else None
        if gdp_pc is not None and gdp_pc <= 0:
            non_positive += 1
            gdp_pc = None
        observations.append(
            CountryYearObservation(
                country_code=country,
                year=year,
                gdp_pc=gdp_pc,
                population=_number(record[physical["population"]], line, physical["population"]),
                net_migration=_number(record[physical["net_migration"]], line, physical["net_migration"]),
            )
        )
    if non_positive:
        print(f"Marked {non_positive} non-positive gdp_pc cells as absent")
    return CountryPanel(observations)


def write_panel(panel: CountryPanel, stream: typing.TextIO, precision: int = 6):
    """Serializes a panel in the logical column layout at a fixed number of decimals"""
    panel.to_frame().to_csv(
        stream, index=False, float_format=f"%.{precision}f", na_rep="", lineterminator="\n"
    )


def splice_growth_rates(panel: CountryPanel, country: str, growth: typing.Dict[int, float]) -> CountryPanel:
    """Fills absent gdp_pc years of one country by compounding percent growth rates
    forward from the last known level. Years without a growth rate stay absent."""
    spliced = []
    last_level = None
    filled = 0
    for obs in panel:
        if obs.country_code != country:
            spliced.append(obs)
            continue
        if obs.gdp_pc is None and last_level is not None and obs.year in growth:
            obs = dataclasses.replace(obs, gdp_pc=last_level * (1 + growth[obs.year] / 100.0))
            filled += 1
        last_level = obs.gdp_pc
        spliced.append(obs)
    if filled:
        print(f"Spliced {filled} gdp_pc years for {country} from growth rates")
    return CountryPanel(spliced)


def net_migration_series(panel: CountryPanel, country: str, label: str) -> EmigrationSeries:
    """Emigration-positive flows (negated inflow-positive net migration) for one country"""
    return EmigrationSeries(label, {o.year: -o.net_migration for o in panel.for_country(country)})


def stocks_to_flows(stocks: typing.Sequence[typing.Tuple[int, float]]) -> typing.List[typing.Tuple[int, float]]:
    """First differences of a consecutive-year stock path"""
    for (previous, _), (year, _) in zip(stocks, stocks[1:]):
        if year <= previous:
            raise plugins.errors.OrderingError(f"Stock years not increasing at {year}")
        if year != previous + 1:
            raise plugins.errors.GapError(previous + 1, "stock path")
    return [(year, stock - prior) for (_, prior), (year, stock) in zip(stocks, stocks[1:])]


def proportional_growth_extrapolation(own_hist_growth: float, ref_hist_growth: float, ref_future_growth: float) -> float:
    if ref_hist_growth == 0:
        raise plugins.errors.UndefinedRatioError("Reference historical growth is zero")
    return ref_future_growth * (own_hist_growth / ref_hist_growth)


def _linear(x0: float, y0: float, x1: float, y1: float, x: float) -> float:
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def interpolate_gap_years(left: typing.Tuple[int, float], right: typing.Tuple[int, float], target: int) -> float:
    if not left[0] < target < right[0]:
        raise plugins.errors.RangeError(f"Year {target} is not strictly between {left[0]} and {right[0]}")
    return _linear(left[0], left[1], right[0], right[1], target)


def annualize_monthly_stocks(
    rows: typing.Iterable[typing.Tuple[str, str, float]], source_tag: SourceTag = SourceTag.R4V
) -> typing.List[MigrantStockRecord]:
    """Turns monthly stock snapshots into one year-end record per (destination, year).

    December is used when published. Otherwise the closest months before and after December are
    interpolated linearly; with only one neighbour available that month is used as is.
    """
    by_destination: typing.Dict[str, typing.Dict[int, float]] = {}
    for destination, when, stock in rows:
        moment = dateutil.parser.parse(str(when), default=MONTH_DEFAULT)
        index = moment.year * 12 + moment.month - 1
        months = by_destination.setdefault(destination, {})
        if index in months:
            raise plugins.errors.DuplicateKeyError((destination, moment.year, moment.month))
        months[index] = float(stock)

    records = []
    interpolated = 0
    for destination in sorted(by_destination):
        months = by_destination[destination]
        indexes = sorted(months)
        for year in sorted({i // 12 for i in indexes}):
            december = year * 12 + 11
            if december in months:
                value = months[december]
            else:
                before = [i for i in indexes if i < december]
                after = [i for i in indexes if i > december]
                if before and after:
                    value = _linear(before[-1], months[before[-1]], after[0], months[after[0]], december)
                else:
                    value = months[(before or after)[-1 if before else 0]]
                interpolated += 1
            records.append(MigrantStockRecord(destination, year, value, source_tag))
    if interpolated:
        print(f"Interpolated {interpolated} year-end {source_tag.value} stocks from adjacent months")
    return records


def load_stock_records(source: typing.TextIO, source_tag: SourceTag) -> typing.List[MigrantStockRecord]:
    """Reads (destination, year, stock) rows, or (destination, date, stock) monthly snapshots"""
    frame = _read_text_frame(source)
    for column in ("destination", "stock"):
        if column not in frame.columns:
            raise plugins.errors.SchemaError(column)
    if "date" in frame.columns and "year" not in frame.columns:
        rows = [
            (r["destination"].strip(), r["date"], _number(r["stock"], i + 2, "stock"))
            for i, r in enumerate(frame.to_dict("records"))
        ]
        return annualize_monthly_stocks(rows, source_tag)
    if "year" not in frame.columns:
        raise plugins.errors.SchemaError("year")
    records = []
    seen = set()
    for i, r in enumerate(frame.to_dict("records")):
        key = (r["destination"].strip(), _year(r["year"], i + 2, "year"))
        if key in seen:
            raise plugins.errors.DuplicateKeyError(key + (source_tag.value,))
        seen.add(key)
        records.append(MigrantStockRecord(key[0], key[1], _number(r["stock"], i + 2, "stock"), source_tag))
    return records


def _paths(records: typing.Iterable[MigrantStockRecord]) -> typing.Dict[str, typing.Dict[int, float]]:
    paths: typing.Dict[str, typing.Dict[int, float]] = {}
    for record in records:
        path = paths.setdefault(record.destination_code, {})
        if record.year in path:
            raise plugins.errors.DuplicateKeyError(
                (record.destination_code, record.year, record.source_tag.value)
            )
        path[record.year] = record.stock
    return paths


def _filled(path: typing.Dict[int, float], first: int, last: int, what: str) -> typing.Dict[int, float]:
    """Restricts a stock path to [first, last], interpolating interior gaps"""
    known = sorted(y for y in path if first <= y <= last)
    if not known or known[0] != first:
        raise plugins.errors.GapError(first, what)
    if known[-1] != last:
        raise plugins.errors.GapError(last, what)
    filled = {y: path[y] for y in known}
    for left, right in zip(known, known[1:]):
        for year in range(left + 1, right):
            filled[year] = interpolate_gap_years((left, path[left]), (right, path[right]), year)
    return filled


def build_emigration_series(
    un_stocks: typing.Iterable[MigrantStockRecord],
    r4v_stocks: typing.Iterable[MigrantStockRecord],
    acs_stocks: typing.Iterable[MigrantStockRecord],
    ine_stocks: typing.Iterable[MigrantStockRecord],
    coverage: typing.Iterable[str],
    label: str = "Migrant stocks",
    end_year: typing.Optional[int] = None,
) -> EmigrationSeries:
    """Assembles global Venezuelan-born stocks abroad and differences them into yearly flows.

    2010-2015 come from the UN migrant stock tables for every destination. From 2017 on, R4V covers the
    destinations listed in `coverage`, ACS the United States and INE Spain; every other destination grows
    from its 2015 level in proportion to its 2010-2015 growth relative to the covered aggregate. 2016 is
    interpolated between 2015 and 2017.
    """
    un = _paths(un_stocks)
    if not un:
        raise plugins.errors.ExtrapolationError("UN migrant stock baseline is empty, cannot extrapolate")
    r4v = _paths(r4v_stocks)
    coverage = list(dict.fromkeys(coverage))
    missing = [d for d in coverage if d not in r4v]
    if missing:
        raise plugins.errors.MissingSourceError(missing)

    survey: typing.Dict[str, typing.Dict[int, float]] = {d: r4v[d] for d in coverage}
    for extra in (_paths(acs_stocks), _paths(ine_stocks)):
        for destination, path in extra.items():
            survey.setdefault(destination, path)
    unbased = [d for d in survey if d not in un]
    if unbased:
        raise plugins.errors.MissingSourceError(unbased, "UN migrant stock")

    last = end_year
    if last is None and survey:
        last = max(y for path in survey.values() for y in path)
    if last is None or last < FIRST_SURVEY_YEAR:
        raise plugins.errors.RangeError(f"Survey stocks must reach at least {FIRST_SURVEY_YEAR}")
    first_base, last_base = UN_BASE_YEARS
    baseline = {d: _filled(p, first_base, last_base, f"UN stocks for {d}") for d, p in un.items()}
    recent = {d: _filled(p, FIRST_SURVEY_YEAR, last, f"survey stocks for {d}") for d, p in survey.items()}

    uncovered = sorted(d for d in baseline if d not in recent)
    if uncovered:
        covered_start = math.fsum(baseline[d][first_base] for d in recent)
        covered_base = math.fsum(baseline[d][last_base] for d in recent)
        if covered_start <= 0 or covered_base <= 0:
            raise plugins.errors.ExtrapolationError("Covered destinations have no UN baseline stock")
        ref_hist = covered_base / covered_start - 1
        covered_totals = {year: math.fsum(recent[d][year] for d in recent) for year in range(FIRST_SURVEY_YEAR, last + 1)}
        extrapolated = {}
        for destination in uncovered:
            start, base = baseline[destination][first_base], baseline[destination][last_base]
            own_hist = base / start - 1 if start > 0 else 0.0
            path = {}
            for year in range(FIRST_SURVEY_YEAR, last + 1):
                ref_future = covered_totals[year] / covered_base - 1
                if ref_hist == 0 and ref_future == 0:
                    growth = 0.0
                else:
                    growth = proportional_growth_extrapolation(own_hist, ref_hist, ref_future)
                path[year] = base * (1 + growth)
            extrapolated[destination] = path
        recent.update(extrapolated)
        print(f"Extrapolated {len(uncovered)} destination(s) without survey coverage")

    totals = []
    for year in range(first_base, last + 1):
        if year <= last_base:
            stock = math.fsum(baseline[d][year] for d in baseline)
        elif year == GAP_YEAR:
            stock = math.fsum(
                interpolate_gap_years((last_base, baseline[d][last_base]), (FIRST_SURVEY_YEAR, recent[d][FIRST_SURVEY_YEAR]), year)
                for d in baseline
            )
        else:
            stock = math.fsum(recent[d][year] for d in baseline)
        totals.append((year, stock))
    return EmigrationSeries(label, dict(stocks_to_flows(totals)))


def series_frame(series: typing.Sequence[EmigrationSeries]) -> pandas.DataFrame:
    """Long-format (year, flow_persons, source_label) table of one or more series"""
    rows = [(year, s.flows[year], s.label) for s in series for year in s.years]
    return pandas.DataFrame(rows, columns=["year", "flow_persons", "source_label"])
