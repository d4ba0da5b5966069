"""Emigration response to GDP growth: the fixed-effects (within) estimator on a country-year
panel, crisis subsamples, the single-country episode ratio, the migration hump classifier and
segmented oil-production decline rates."""
import dataclasses
import enum
import math
import typing

import numpy
import pandas

import plugins.errors
import plugins.panel_store

CRISIS_THRESHOLD = 0.0
LARGE_CRISIS_THRESHOLD = -5.0
HUMP_THRESHOLD = 10000.0


class FilterKind(enum.Enum):
    FULL = "FULL"
    CRISIS = "CRISIS"
    LARGE_CRISIS = "LARGE_CRISIS"
    CUSTOM = "CUSTOM"


class HumpPosition(enum.Enum):
    ABOVE = "ABOVE"
    BELOW = "BELOW"


@dataclasses.dataclass(frozen=True)
class RegressionObservation:
    country_code: str
    year: int
    e: float
    g: float

    def __post_init__(self):
        if not (math.isfinite(self.e) and math.isfinite(self.g)):
            raise plugins.errors.DomainError(f"Non-finite regression observation {self.country_code} {self.year}")


@dataclasses.dataclass(frozen=True)
class SampleFilter:
    kind: FilterKind
    threshold: typing.Optional[float] = None

    @classmethod
    def parse(cls, spec: typing.Union[str, float, int]) -> "SampleFilter":
        """FULL, CRISIS, LARGE_CRISIS, or a number meaning "growth below this many log points" """
        if isinstance(spec, (int, float)) and not isinstance(spec, bool):
            return cls(FilterKind.CUSTOM, float(spec))
        try:
            kind = FilterKind(str(spec).strip().upper())
        except ValueError:
            raise plugins.errors.DomainError(f"Unknown sample filter {spec!r}")
        if kind is FilterKind.CUSTOM:
            raise plugins.errors.DomainError("A custom filter needs a numeric threshold")
        return cls(kind)

    @property
    def cutoff(self) -> typing.Optional[float]:
        return {
            FilterKind.FULL: None,
            FilterKind.CRISIS: CRISIS_THRESHOLD,
            FilterKind.LARGE_CRISIS: LARGE_CRISIS_THRESHOLD,
            FilterKind.CUSTOM: self.threshold,
        }[self.kind]

    @property
    def label(self) -> str:
        if self.kind is FilterKind.CUSTOM:
            return f"Growth below {self.threshold:g}"
        return {
            FilterKind.FULL: "Complete sample",
            FilterKind.CRISIS: "All crisis episodes",
            FilterKind.LARGE_CRISIS: "Large crisis episodes",
        }[self.kind]


@dataclasses.dataclass(frozen=True)
class FixedEffectsEstimate:
    alpha1: float
    country_effects: typing.Dict[str, float]
    n_obs: int
    n_countries: int
    residuals: typing.Tuple[float, ...]
    keys: typing.Tuple[typing.Tuple[str, int], ...]


@dataclasses.dataclass(frozen=True)
class SegmentRate:
    start: int
    end: int
    mean_log_change: float


@dataclasses.dataclass(frozen=True)
class WindowDrop:
    start: int
    end: int
    percent: float
    absolute: float


@dataclasses.dataclass(frozen=True)
class SegmentReport:
    segments: typing.Tuple[SegmentRate, ...]
    windows: typing.Tuple[WindowDrop, ...]


def derive_regression_panel(panel: plugins.panel_store.CountryPanel) -> typing.List[RegressionObservation]:
    """e = net emigration in percent of population, g = 100 * log growth of gdp_pc over the prior year"""
    observations = []
    excluded = 0
    for country in panel.countries():
        levels = {}
        for obs in panel.for_country(country):
            if obs.gdp_pc is not None and obs.gdp_pc <= 0:
                excluded += 1
                continue
            levels[obs.year] = obs
        for year, obs in sorted(levels.items()):
            prior = levels.get(year - 1)
            if prior is None or obs.gdp_pc is None or prior.gdp_pc is None:
                continue
            observations.append(
                RegressionObservation(
                    country_code=country,
                    year=year,
                    e=-obs.net_migration / obs.population * 100,
                    g=100 * (math.log(obs.gdp_pc) - math.log(prior.gdp_pc)),
                )
            )
    if excluded:
        print(f"Excluded {excluded} observations with zero or negative gdp_pc")
    return observations


def apply_filter(
    obs: typing.Sequence[RegressionObservation], sample: SampleFilter
) -> typing.List[RegressionObservation]:
    """Keeps country-years with growth below the filter's cutoff, then drops countries left with a
    single observation. The full sample passes through untouched."""
    cutoff = sample.cutoff
    if cutoff is None:
        return list(obs)
    kept = [o for o in obs if o.g < cutoff]
    counts: typing.Dict[str, int] = {}
    for o in kept:
        counts[o.country_code] = counts.get(o.country_code, 0) + 1
    return [o for o in kept if counts[o.country_code] >= 2]


def _frame(obs: typing.Sequence[RegressionObservation]) -> pandas.DataFrame:
    frame = pandas.DataFrame(
        [(o.country_code, o.year, o.e, o.g) for o in obs], columns=["country", "year", "e", "g"]
    )
    return frame.sort_values(["country", "year"], kind="mergesort").reset_index(drop=True)


def fe_within_estimate(obs: typing.Sequence[RegressionObservation]) -> FixedEffectsEstimate:
    """Within estimator of e_it = a1 * g_it + eta_i + eps_it.

    Both variables are demeaned inside each country; the slope is sum(g~ e~) / sum(g~^2).
    The intercept is absorbed into the country effects. Singleton countries carry no
    within variation and are left out.
    """
    frame = _frame(obs)
    if frame.empty:
        raise plugins.errors.InsufficientDataError("No observations to estimate on")
    sizes = frame.groupby("country")["year"].transform("size")
    frame = frame[sizes >= 2].reset_index(drop=True)
    if frame.empty:
        raise plugins.errors.InsufficientDataError("Every country has a single observation")

    grouped = frame.groupby("country", sort=True)
    mean_e = grouped["e"].transform("mean")
    mean_g = grouped["g"].transform("mean")
    g_dm = (frame["g"] - mean_g).to_numpy()
    e_dm = (frame["e"] - mean_e).to_numpy()

    # fsum keeps the totals independent of the order countries are visited in
    denominator = math.fsum(g_dm * g_dm)
    scale = math.fsum(frame["g"].to_numpy() ** 2)
    if denominator <= numpy.finfo(float).eps * max(scale, 1.0):
        raise plugins.errors.DegenerateRegressorError("Growth has no variation within countries")
    alpha1 = math.fsum(g_dm * e_dm) / denominator

    means = grouped[["e", "g"]].mean()
    effects = {country: float(row.e - alpha1 * row.g) for country, row in means.iterrows()}
    eta = frame["country"].map(effects).to_numpy()
    residuals = frame["e"].to_numpy() - eta - alpha1 * frame["g"].to_numpy()
    return FixedEffectsEstimate(
        alpha1=alpha1,
        country_effects=effects,
        n_obs=len(frame),
        n_countries=len(effects),
        residuals=tuple(float(r) for r in residuals),
        keys=tuple(zip(frame["country"], (int(y) for y in frame["year"]))),
    )


def _window_mean(series: typing.Dict[int, typing.Tuple[float, float]], years: typing.Tuple[int, int], index: int) -> float:
    start, end = years
    if start > end:
        raise plugins.errors.OrderingError(f"Window {start}-{end} is reversed")
    for year in range(start, end + 1):
        if year not in series:
            raise plugins.errors.GapError(year, "episode series")
    return math.fsum(series[y][index] for y in range(start, end + 1)) / (end - start + 1)


def episode_ratio_coefficient(
    series: typing.Dict[int, typing.Tuple[float, float]],
    base_years: typing.Tuple[int, int],
    crisis_years: typing.Tuple[int, int],
) -> float:
    """Change in mean emigration rate over the change in mean 100 * ln(gdp_pc) between a base
    window and a crisis window. Emigration rising while GDP falls gives a negative slope."""
    numerator = _window_mean(series, crisis_years, 0) - _window_mean(series, base_years, 0)
    denominator = 100 * (_window_mean(series, crisis_years, 1) - _window_mean(series, base_years, 1))
    if numerator == 0:
        return 0.0
    if denominator == 0:
        raise plugins.errors.UndefinedRatioError("GDP did not change between the base and crisis windows")
    return numerator / denominator


def episode_series(
    panel: plugins.panel_store.CountryPanel,
    country: str,
    flows: typing.Optional[plugins.panel_store.EmigrationSeries] = None,
) -> typing.Dict[int, typing.Tuple[float, float]]:
    """Year -> (emigration rate in percent, ln gdp_pc) for one country.

    The emigration rate comes from the panel's net migration unless a flow series is supplied.
    """
    series = {}
    for obs in panel.for_country(country):
        if obs.gdp_pc is None:
            continue
        if flows is None:
            emigrants = -obs.net_migration
        elif obs.year in flows.flows:
            emigrants = flows.flows[obs.year]
        else:
            continue
        series[obs.year] = (emigrants / obs.population * 100, math.log(obs.gdp_pc))
    return series


def classify_hump_position(gdp_pc_ppp2011: float, threshold: float = HUMP_THRESHOLD) -> HumpPosition:
    if gdp_pc_ppp2011 <= 0 or threshold <= 0:
        raise plugins.errors.DomainError("Income and threshold must be positive")
    return HumpPosition.ABOVE if gdp_pc_ppp2011 >= threshold else HumpPosition.BELOW


def segment_decline_rates(
    monthly: typing.Sequence[float],
    breakpoints: typing.Sequence[int],
    jump_windows: typing.Sequence[typing.Tuple[int, int]] = (),
) -> SegmentReport:
    """Mean monthly log change (x100) inside each segment and discrete drops across jump windows.

    Breakpoints are month indices; segment k runs from one boundary to the next, both included,
    so each boundary month closes one segment and opens the following one.
    """
    values = numpy.asarray(monthly, dtype=float)
    if values.size < 2:
        raise plugins.errors.InsufficientDataError("Need at least two months of production")
    if numpy.any(values <= 0):
        raise plugins.errors.DomainError("Production must be strictly positive")
    last = values.size - 1
    bounds = [0, *breakpoints, last]
    for left, right in zip(bounds, bounds[1:]):
        if right <= left:
            raise plugins.errors.OrderingError(f"Breakpoints must be increasing and interior, got {list(breakpoints)}")

    changes = 100 * numpy.diff(numpy.log(values))
    segments = tuple(
        SegmentRate(left, right, math.fsum(changes[left:right]) / (right - left))
        for left, right in zip(bounds, bounds[1:])
    )
    windows = []
    for start, end in jump_windows:
        if not 0 <= start < end <= last:
            raise plugins.errors.RangeError(f"Jump window ({start}, {end}) outside months 0-{last}")
        windows.append(WindowDrop(start, end, (values[end] / values[start] - 1) * 100, float(values[end] - values[start])))
    return SegmentReport(segments, tuple(windows))


def estimation_frame(rows: typing.Sequence[typing.Tuple[str, typing.Union[FixedEffectsEstimate, float, Exception]]]) -> pandas.DataFrame:
    """Sample / coefficient table; failed rows carry the error text instead of a coefficient"""
    records = []
    for label, outcome in rows:
        if isinstance(outcome, FixedEffectsEstimate):
            records.append((label, outcome.alpha1, outcome.n_obs, outcome.n_countries, ""))
        elif isinstance(outcome, Exception):
            records.append((label, None, None, None, f"error: {outcome}"))
        else:
            records.append((label, float(outcome), None, None, ""))
    frame = pandas.DataFrame(records, columns=["sample", "coefficient", "n_obs", "n_countries", "error"])
    return frame.astype({"n_obs": "Int64", "n_countries": "Int64"})


def effects_frame(estimate: FixedEffectsEstimate) -> pandas.DataFrame:
    return pandas.DataFrame(
        sorted(estimate.country_effects.items()), columns=["country", "effect"]
    )


def segments_frame(report: SegmentReport) -> pandas.DataFrame:
    rows = [("segment", s.start, s.end, s.mean_log_change, None) for s in report.segments]
    rows += [("jump", w.start, w.end, w.percent, w.absolute) for w in report.windows]
    return pandas.DataFrame(rows, columns=["kind", "start_month", "end_month", "percent", "absolute"])
