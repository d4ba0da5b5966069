"""Sanctions scenario engine: oil price and export revenue, import capacity, GDP growth over
the projection horizon and the resulting five-year emigration totals"""
import dataclasses
import math
import typing

import pandas

import plugins.errors

DAYS_PER_YEAR = 365
VARIANTS = ("conservative", "intermediate", "historical")
AVERAGE = "average"
DEFAULT_HEADLINE = ("Return to maximum pressure", "Lifting of all economic sanctions")


@dataclasses.dataclass(frozen=True)
class CalibrationConstants:
    """Global scenario constants. Prices in USD/bbl, volumes in thousand bbl/day, money in thousand USD/yr.

    benchmark_price, domestic_consumption, non_oil_exports, credit_access_annual and population are
    back-solved from the published scenario tables (see back_solve_constants). gdp_ratio converts
    productivity losses measured in points of 2012 GDP into points of current GDP.
    """
    benchmark_price: float = 85.5
    domestic_consumption: float = 179.6
    non_oil_exports: float = 555553.0
    credit_access_annual: float = 2979011.0
    baseline_growth: float = 2.0
    oil_gdp_share: float = 0.12
    import_elasticity: float = 0.30
    tfp_recovery: float = 24.3
    gdp_ratio: float = 0.65
    population: float = 28.2e6
    baseline_annual_emigrants: float = 163265.6
    horizon_years: int = 5

    def __post_init__(self):
        for name in ("benchmark_price", "population", "gdp_ratio"):
            if not getattr(self, name) > 0:
                raise plugins.errors.DomainError(f"{name} must be positive")
        for name in ("domestic_consumption", "non_oil_exports", "credit_access_annual", "tfp_recovery",
                     "baseline_annual_emigrants"):
            if getattr(self, name) < 0:
                raise plugins.errors.DomainError(f"{name} must not be negative")
        for name in ("oil_gdp_share", "import_elasticity"):
            if not 0 < getattr(self, name) < 1:
                raise plugins.errors.DomainError(f"{name} must lie in (0, 1)")
        if not math.isfinite(self.baseline_growth):
            raise plugins.errors.DomainError("baseline_growth must be finite")
        if int(self.horizon_years) != self.horizon_years or self.horizon_years < 1:
            raise plugins.errors.DomainError("horizon_years must be a whole number of at least 1")


@dataclasses.dataclass(frozen=True)
class ScenarioSpec:
    name: str
    production: float
    discount: float
    credit_access: bool = False
    tfp_recovery_applies: bool = False
    growth_override: typing.Optional[float] = None

    def __post_init__(self):
        if self.production < 0:
            raise plugins.errors.DomainError(f"Scenario '{self.name}': production must not be negative")
        if not 0 <= self.discount < 1:
            raise plugins.errors.DomainError(f"Scenario '{self.name}': discount {self.discount} outside [0, 1)")


@dataclasses.dataclass(frozen=True)
class MigrationCoefficients:
    conservative: float = -0.022
    intermediate: float = -0.029
    historical: float = -0.052

    def __post_init__(self):
        for name in VARIANTS:
            if not getattr(self, name) < 0:
                raise plugins.errors.DomainError(f"Migration coefficient '{name}' must be negative")

    def variants(self) -> typing.Dict[str, float]:
        return {name: getattr(self, name) for name in VARIANTS}


@dataclasses.dataclass(frozen=True)
class ScenarioResult:
    name: str
    production: float
    discount: float
    oil_price: float
    oil_exports: float
    imports: float
    gdp_growth: float
    emigration_totals: typing.Dict[str, float]


@dataclasses.dataclass(frozen=True)
class ScenarioComparison:
    reference: str
    deltas: typing.Dict[str, typing.Dict[str, float]]
    dataset: typing.Tuple[typing.Tuple[str, str, float], ...]
    headline: typing.Optional[float]


@dataclasses.dataclass(frozen=True)
class PublishedRow:
    """One published scenario row used to back out the calibration constants"""
    name: str
    discount: float
    production: float
    oil_price: float
    oil_exports: float
    imports: float
    credit_access: bool = False


def effective_oil_price(benchmark: float, discount: float) -> float:
    if not 0 <= discount < 1:
        raise plugins.errors.DomainError(f"Discount {discount} outside [0, 1)")
    return benchmark * (1 - discount)


def annual_oil_exports(production: float, domestic_consumption: float, price: float) -> float:
    """Net exportable production valued at the realized price, thousand USD per year"""
    if production < domestic_consumption:
        raise plugins.errors.InfeasibleExportsError(
            f"Production {production} tbd below domestic consumption {domestic_consumption} tbd"
        )
    return (production - domestic_consumption) * price * DAYS_PER_YEAR


def import_capacity(oil_exports: float, constants: CalibrationConstants, credit_access: bool) -> float:
    return oil_exports + constants.non_oil_exports + (constants.credit_access_annual if credit_access else 0.0)


def _imports(spec: ScenarioSpec, constants: CalibrationConstants) -> float:
    price = effective_oil_price(constants.benchmark_price, spec.discount)
    exports = annual_oil_exports(spec.production, constants.domestic_consumption, price)
    return import_capacity(exports, constants, spec.credit_access)


def relative_gdp_effect(spec: ScenarioSpec, baseline: ScenarioSpec, constants: CalibrationConstants) -> float:
    """Cumulative percent GDP effect of a scenario relative to the baseline over the horizon.

    Oil GDP moves one for one with production; non-oil GDP moves with import capacity through the
    import externality; lifting sanctions adds back the sanctions-induced productivity loss,
    converted from points of 2012 GDP into points of current GDP.
    """
    if baseline.production == 0:
        raise plugins.errors.UndefinedRatioError(f"Baseline '{baseline.name}' has zero production")
    baseline_imports = _imports(baseline, constants)
    if baseline_imports == 0:
        raise plugins.errors.UndefinedRatioError(f"Baseline '{baseline.name}' has zero import capacity")
    production_change = (spec.production / baseline.production - 1) * 100
    imports_change = (_imports(spec, constants) / baseline_imports - 1) * 100
    effect = (
        constants.oil_gdp_share * production_change
        + (1 - constants.oil_gdp_share) * constants.import_elasticity * imports_change
    )
    if spec.tfp_recovery_applies:
        effect += constants.tfp_recovery / constants.gdp_ratio
    return effect


def gdp_growth_path(
    spec: ScenarioSpec, baseline: ScenarioSpec, constants: CalibrationConstants, use_override: bool = True
) -> float:
    """Average annual GDP growth over the horizon, percent. A scenario's growth override wins
    unless use_override is False (computed mode)."""
    if use_override and spec.growth_override is not None:
        return spec.growth_override
    return constants.baseline_growth + relative_gdp_effect(spec, baseline, constants) / constants.horizon_years


def project_migration(
    scenario_growth: float, baseline_growth: float, coefficient: float, constants: CalibrationConstants
) -> float:
    """Emigrants over the horizon with population held constant; negative means net return"""
    annual = constants.baseline_annual_emigrants + coefficient * (scenario_growth - baseline_growth) * constants.population / 100
    return annual * constants.horizon_years


def run_scenario(
    spec: ScenarioSpec,
    baseline: ScenarioSpec,
    constants: CalibrationConstants,
    coefficients: MigrationCoefficients,
    use_override: bool = True,
) -> ScenarioResult:
    price = effective_oil_price(constants.benchmark_price, spec.discount)
    exports = annual_oil_exports(spec.production, constants.domestic_consumption, price)
    imports = import_capacity(exports, constants, spec.credit_access)
    growth = gdp_growth_path(spec, baseline, constants, use_override)
    totals = {
        name: project_migration(growth, constants.baseline_growth, coefficient, constants)
        for name, coefficient in coefficients.variants().items()
    }
    totals[AVERAGE] = math.fsum(totals[name] for name in VARIANTS) / len(VARIANTS)
    return ScenarioResult(spec.name, spec.production, spec.discount, price, exports, imports, growth, totals)


def compare_scenarios(
    results: typing.Sequence[ScenarioResult],
    reference: str,
    headline: typing.Tuple[str, str] = DEFAULT_HEADLINE,
) -> ScenarioComparison:
    """Emigration deltas against a reference scenario plus the bar-chart dataset.

    The headline is the average-variant gap between the two scenarios named in `headline`
    (maximum pressure minus lifting by default), or None when either is absent.
    """
    by_name = {r.name: r for r in results}
    if reference not in by_name:
        raise plugins.errors.LookupFailure(f"Unknown reference scenario '{reference}'")
    base = by_name[reference].emigration_totals
    deltas = {
        r.name: {variant: total - base[variant] for variant, total in r.emigration_totals.items()}
        for r in results
    }
    dataset = tuple(
        (r.name, variant, r.emigration_totals[variant]) for r in results for variant in (*VARIANTS, AVERAGE)
    )
    high, low = headline
    gap = None
    if high in by_name and low in by_name:
        gap = by_name[high].emigration_totals[AVERAGE] - by_name[low].emigration_totals[AVERAGE]
    return ScenarioComparison(reference, deltas, dataset, gap)


def back_solve_constants(rows: typing.Sequence[PublishedRow]) -> typing.Dict[str, typing.Tuple[float, float]]:
    """Backs the unstated constants out of published scenario rows.

    Returns name -> (mean across rows, max - min spread): benchmark price from price / (1 - discount),
    domestic consumption from production - exports / (price * 365), non-oil exports from imports - exports
    on rows without credit, and the credit term as the residual on rows with credit.
    """
    def summary(values: typing.List[float]) -> typing.Tuple[float, float]:
        if not values:
            raise plugins.errors.InsufficientDataError("No published rows to back-solve from")
        return math.fsum(values) / len(values), max(values) - min(values)

    fit = {
        "benchmark_price": summary([r.oil_price / (1 - r.discount) for r in rows]),
        "domestic_consumption": summary(
            [r.production - r.oil_exports / (r.oil_price * DAYS_PER_YEAR) for r in rows]
        ),
        "non_oil_exports": summary([r.imports - r.oil_exports for r in rows if not r.credit_access]),
    }
    credit = [r.imports - r.oil_exports - fit["non_oil_exports"][0] for r in rows if r.credit_access]
    if credit:
        fit["credit_access_annual"] = summary(credit)
    return fit


def table6_frame(results: typing.Sequence[ScenarioResult]) -> pandas.DataFrame:
    return pandas.DataFrame(
        [(r.name, r.discount * 100, r.production, r.oil_price, r.oil_exports) for r in results],
        columns=["scenario", "discount_pct", "production_tbd", "oil_price", "oil_exports"],
    )


def table7_frame(results: typing.Sequence[ScenarioResult]) -> pandas.DataFrame:
    return pandas.DataFrame(
        [
            (r.name, r.imports, r.gdp_growth, *(r.emigration_totals[v] for v in (*VARIANTS, AVERAGE)))
            for r in results
        ],
        columns=["scenario", "imports", "gdp_growth", *VARIANTS, AVERAGE],
    )


def dataset_frame(comparison: ScenarioComparison) -> pandas.DataFrame:
    return pandas.DataFrame(list(comparison.dataset), columns=["scenario", "variant", "persons"])
