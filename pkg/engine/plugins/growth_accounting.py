"""Growth accounting: collapse metrics, conventional and import-adjusted sources-of-growth
decompositions, and the additive channel tree splitting the 2012-2020 decline into sanctions
and other causes."""
import dataclasses
import math
import os
import typing

import numpy
import pandas
import yaml

import plugins.errors
import plugins.panel_store

SANCTIONS = "sanctions"
OTHER = "other"
PEACETIME = "peacetime"
SHARE_SLACK = 1.05

DEFAULT_CHANNEL_TREE = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data", "channel_tree.yaml")


@dataclasses.dataclass(frozen=True)
class PeriodGrowthRates:
    label: str
    g_Y: float
    g_K: float
    g_H: float
    g_M: float

    def __post_init__(self):
        if not self.label:
            raise plugins.errors.DomainError("Period label must not be empty")
        for name in ("g_Y", "g_K", "g_H", "g_M"):
            if not math.isfinite(getattr(self, name)):
                raise plugins.errors.DomainError(f"{name} for {self.label} is not finite")


@dataclasses.dataclass(frozen=True)
class FactorShares:
    capital_share: float = 0.57
    human_share: float = 0.43
    import_elasticity: float = 0.30

    def __post_init__(self):
        for name in ("capital_share", "human_share", "import_elasticity"):
            if not 0 < getattr(self, name) < 1:
                raise plugins.errors.DomainError(f"{name} must lie in (0, 1), got {getattr(self, name)}")
        if self.capital_share + self.human_share > SHARE_SLACK:
            raise plugins.errors.DomainError("capital_share + human_share exceeds 1")


@dataclasses.dataclass(frozen=True)
class GrowthDecomposition:
    label: str
    g_Y: float
    contributions: typing.Dict[str, float]
    percentage_contributions: typing.Dict[str, typing.Optional[float]]


@dataclasses.dataclass(frozen=True)
class ChannelNode:
    name: str
    value: float
    children: typing.Tuple["ChannelNode", ...] = ()
    tag: typing.Optional[str] = None

    def leaves(self) -> typing.List["ChannelNode"]:
        if not self.children:
            return [self]
        return [leaf for child in self.children for leaf in child.leaves()]

    def walk(self, depth: int = 0) -> typing.Iterator[typing.Tuple[int, "ChannelNode"]]:
        yield depth, self
        for child in self.children:
            yield from child.walk(depth + 1)


@dataclasses.dataclass(frozen=True)
class CollapseMetrics:
    trough_to_peak: float
    years: int
    avg_annual_decline: float
    cumulative_loss: float
    mean_annual_change: float


@dataclasses.dataclass(frozen=True)
class CollapseRow:
    rank: int
    peacetime_rank: typing.Optional[int]
    country: str
    peak_year: int
    trough_year: int
    metrics: CollapseMetrics
    classification: str


def _percentages(contributions: typing.Dict[str, float], g_Y: float) -> typing.Dict[str, typing.Optional[float]]:
    if g_Y == 0:
        return {key: None for key in contributions}
    return {key: value / g_Y * 100 for key, value in contributions.items()}


def decompose_conventional(rates: PeriodGrowthRates, shares: FactorShares) -> GrowthDecomposition:
    capital = shares.capital_share * rates.g_K
    human = shares.human_share * rates.g_H
    contributions = {"capital": capital, "human_capital": human, "tfp": rates.g_Y - capital - human}
    return GrowthDecomposition(rates.label, rates.g_Y, contributions, _percentages(contributions, rates.g_Y))


def decompose_import_adjusted(
    conv: GrowthDecomposition, rates: PeriodGrowthRates, shares: FactorShares
) -> GrowthDecomposition:
    imports = shares.import_elasticity * rates.g_M
    contributions = {
        "capital": conv.contributions["capital"],
        "human_capital": conv.contributions["human_capital"],
        "imports": imports,
        "tfp": conv.contributions["tfp"] - imports,
    }
    return GrowthDecomposition(rates.label, rates.g_Y, contributions, _percentages(contributions, rates.g_Y))


def period_rates(series: pandas.DataFrame, label: str, start: int, end: int) -> PeriodGrowthRates:
    """Annualized log-point growth (percent) of the gdp, capital, human_capital and imports
    columns of a year-indexed level series between two years"""
    if start >= end:
        raise plugins.errors.OrderingError(f"Period {label}: start {start} must precede end {end}")
    for year in (start, end):
        if year not in series.index:
            raise plugins.errors.RangeError(
                f"Period {label}: year {year} outside series coverage {series.index.min()}-{series.index.max()}"
            )
    span = end - start
    rates = {}
    for column in ("gdp", "capital", "human_capital", "imports"):
        levels = pandas.to_numeric(series.loc[[start, end], column], errors="coerce")
        if levels.isna().any():
            bad = levels.index[levels.isna()][0]
            raise plugins.errors.ParseError(int(bad), column, str(series.at[bad, column]))
        first, last = float(levels.iloc[0]), float(levels.iloc[1])
        if not (first > 0 and last > 0):
            raise plugins.errors.DomainError(f"Period {label}: {column} levels must be positive, got {first} and {last}")
        rates[column] = 100 * (math.log(last) - math.log(first)) / span
    return PeriodGrowthRates(label, rates["gdp"], rates["capital"], rates["human_capital"], rates["imports"])


def decomposition_frame(
    periods: typing.Sequence[typing.Tuple[PeriodGrowthRates, GrowthDecomposition, GrowthDecomposition]]
) -> pandas.DataFrame:
    """Growth / Contribution / Percentage Contribution rows for every period"""
    columns = ["period", "row", "GDP", "Capital", "Human Capital", "TFP", "Imports", "TFP (import-adjusted)"]
    rows = []
    for rates, conv, adjusted in periods:
        rows.append([rates.label, "Growth", rates.g_Y, rates.g_K, rates.g_H, None, rates.g_M, None])
        rows.append([
            rates.label, "Contribution", rates.g_Y,
            conv.contributions["capital"], conv.contributions["human_capital"], conv.contributions["tfp"],
            adjusted.contributions["imports"], adjusted.contributions["tfp"],
        ])
        share = conv.percentage_contributions
        adjusted_share = adjusted.percentage_contributions
        rows.append([
            rates.label, "Percentage Contribution", 100.0 if rates.g_Y else None,
            share["capital"], share["human_capital"], share["tfp"],
            adjusted_share["imports"], adjusted_share["tfp"],
        ])
    return pandas.DataFrame(rows, columns=columns)


def _build_node(schema: dict, leaves: typing.Dict[str, float], share: float, used: typing.Set[str],
                unmatched: typing.List[str]) -> ChannelNode:
    name = schema.get("name", "")
    children = schema.get("children") or []
    if children:
        nodes = tuple(_build_node(child, leaves, share, used, unmatched) for child in children)
        return ChannelNode(name, math.fsum(node.value for node in nodes), nodes)
    key = schema.get("key", name)
    if key not in leaves:
        unmatched.append(key)
        return ChannelNode(name, 0.0)
    used.add(key)
    try:
        value = float(leaves[key])
    except (TypeError, ValueError):
        raise plugins.errors.DomainError(f"Channel leaf {key} is not a number: {leaves[key]!r}")
    if not math.isfinite(value):
        raise plugins.errors.DomainError(f"Channel leaf {key} is not finite")
    if schema.get("split"):
        attributed = value * share
        return ChannelNode(
            name, value,
            (ChannelNode("Sanctions effect", attributed, tag=SANCTIONS), ChannelNode("Other causes", value - attributed, tag=OTHER)),
        )
    return ChannelNode(name, value, tag=schema.get("tag", OTHER))


def load_channel_tree(path: str = DEFAULT_CHANNEL_TREE) -> dict:
    """Reads a channel tree schema (name, key, split, tag, children) from YAML"""
    with open(path, encoding="utf-8") as f:
        tree = yaml.safe_load(f)
    if not isinstance(tree, dict) or "name" not in tree:
        raise plugins.errors.ConfigError("tree", "channel tree must be a mapping with a root name").with_source(path)
    return tree


def channel_decompose(
    leaves: typing.Dict[str, float], tree_schema: typing.Optional[dict] = None, sanctions_share: float = 0.503
) -> ChannelNode:
    """Builds the additive decomposition tree from leaf values (pp of 2012 GDP).

    Every parent is the sum of its children. Leaves flagged `split` are divided into a sanctions
    effect (value * sanctions_share) and other causes (the remainder).
    """
    if not 0 < sanctions_share < 1:
        raise plugins.errors.DomainError(f"Sanctions share must lie in (0, 1), got {sanctions_share}")
    used: typing.Set[str] = set()
    unmatched: typing.List[str] = []
    root = _build_node(tree_schema or load_channel_tree(), leaves, sanctions_share, used, unmatched)
    unmatched.extend(key for key in leaves if key not in used)
    if unmatched:
        raise plugins.errors.StructureError(unmatched)
    return root


def channel_aggregates(root: ChannelNode) -> typing.Dict[str, float]:
    """Total plus the sums of sanctions-tagged and other-tagged leaves"""
    leaves = root.leaves()
    return {
        "total": root.value,
        SANCTIONS: math.fsum(leaf.value for leaf in leaves if leaf.tag == SANCTIONS),
        OTHER: math.fsum(leaf.value for leaf in leaves if leaf.tag != SANCTIONS),
    }


def channel_shares(root: ChannelNode) -> typing.List[typing.Tuple[int, str, float, typing.Optional[float]]]:
    """(depth, name, value, percent of root) for every node, depth-first"""
    return [
        (depth, node.name, node.value, node.value / root.value * 100 if root.value else None)
        for depth, node in root.walk()
    ]


def channel_frame(root: ChannelNode) -> pandas.DataFrame:
    """Indented concept / value / percentage table followed by the aggregates block"""
    rows = [("  " * depth + name, value, pct) for depth, name, value, pct in channel_shares(root)]
    aggregates = channel_aggregates(root)
    rows.append(("Aggregates", None, None))
    for label, key in (("Change in per capita GDP", "total"), ("Sanctions and toxification effects", SANCTIONS), ("Other causes", OTHER)):
        value = aggregates[key]
        rows.append(("  " + label, value, value / root.value * 100 if root.value else None))
    return pandas.DataFrame(rows, columns=["concept", "cumulative_percent", "percentage_contribution"])


def sanctions_production_share(group_a: typing.Sequence[float], group_b: typing.Sequence[float]) -> float:
    """Midpoint between the averages of two families of sanctions-share estimates"""
    if not group_a or not group_b:
        raise plugins.errors.DomainError("Both groups of share estimates must be nonempty")
    return (math.fsum(group_a) / len(group_a) + math.fsum(group_b) / len(group_b)) / 2


def collapse_metrics(series: typing.Dict[int, float], peak_year: int, trough_year: int) -> CollapseMetrics:
    if peak_year >= trough_year:
        raise plugins.errors.OrderingError(f"Peak year {peak_year} must precede trough year {trough_year}")
    for year in range(peak_year, trough_year + 1):
        if year not in series:
            raise plugins.errors.GapError(year, "GDP per capita series")
    peak = series[peak_year]
    ratio = series[trough_year] / peak
    years = trough_year - peak_year
    path = range(peak_year + 1, trough_year + 1)
    return CollapseMetrics(
        trough_to_peak=(ratio - 1) * 100,
        years=years,
        avg_annual_decline=(ratio ** (1 / years) - 1) * 100,
        cumulative_loss=math.fsum((series[t] / peak - 1) * 100 for t in path),
        mean_annual_change=math.fsum((series[t] / series[t - 1] - 1) * 100 for t in path) / years,
    )


def deepest_decline(values: numpy.ndarray) -> typing.Optional[typing.Tuple[int, int, float]]:
    """Exhaustive scan for the (peak, trough) index pair with the lowest trough/peak ratio.

    Ties resolve to the earliest peak, then the earliest trough. Returns None without a decline.
    """
    n = len(values)
    if n < 2:
        return None
    ratios = values[numpy.newaxis, :] / values[:, numpy.newaxis]
    ratios[~numpy.triu(numpy.ones((n, n), dtype=bool), k=1)] = numpy.inf
    peak, trough = numpy.unravel_index(numpy.argmin(ratios), ratios.shape)
    ratio = float(ratios[peak, trough])
    if ratio >= 1:
        return None
    return int(peak), int(trough), ratio


def _runs(years: typing.List[int]) -> typing.List[typing.List[int]]:
    runs: typing.List[typing.List[int]] = []
    for year in years:
        if runs and year == runs[-1][-1] + 1:
            runs[-1].append(year)
        else:
            runs.append([year])
    return runs


def rank_collapses(
    panel: plugins.panel_store.CountryPanel,
    conflict_flags: typing.Dict[str, str],
    top_k: typing.Optional[int] = None,
) -> typing.List[CollapseRow]:
    """Largest trough-to-peak decline per country, ranked overall and among peacetime episodes"""
    found = []
    for country in panel.countries():
        series = panel.gdp_series(country)
        best = None
        for run in _runs(sorted(series)):
            pair = deepest_decline(numpy.array([series[y] for y in run], dtype=float))
            if pair and (best is None or pair[2] < best[2]):
                best = (run[pair[0]], run[pair[1]], pair[2])
        if best:
            found.append((country, best[0], best[1], collapse_metrics(series, best[0], best[1])))

    found.sort(key=lambda item: (item[3].trough_to_peak, item[0]))
    rows = []
    peacetime = 0
    for rank, (country, peak, trough, metrics) in enumerate(found, start=1):
        classification = conflict_flags.get(country, "")
        peacetime_rank = None
        if classification.strip().lower() == PEACETIME:
            peacetime += 1
            peacetime_rank = peacetime
        rows.append(CollapseRow(rank, peacetime_rank, country, peak, trough, metrics, classification))
    return rows[:top_k] if top_k else rows


def collapse_frame(rows: typing.Sequence[CollapseRow]) -> pandas.DataFrame:
    return pandas.DataFrame(
        [
            (
                r.rank, r.peacetime_rank if r.peacetime_rank is not None else "-", r.country,
                r.metrics.trough_to_peak, f"{r.peak_year}-{r.trough_year}", r.metrics.years,
                r.metrics.avg_annual_decline, r.metrics.mean_annual_change, r.metrics.cumulative_loss,
                r.classification,
            )
            for r in rows
        ],
        columns=[
            "rank", "peacetime_rank", "country", "trough_to_peak", "period", "years",
            "avg_annual_decline", "mean_annual_change", "cumulative_loss", "armed_conflict",
        ],
    )
