"""scenario run: oil revenue, imports, growth and five-year emigration under each sanctions regime (Tables 6-7, Figure 8)"""
import argparse

import pandas

import plugins.basetypes
import plugins.configuration
import plugins.errors
import plugins.scenarios
import plugins.svgchart
import plugins.timer


def _calibration_check(scenario_file: plugins.configuration.ScenarioFile):
    if not scenario_file.published:
        return
    fit = plugins.scenarios.back_solve_constants(scenario_file.published)
    for name, (mean, spread) in sorted(fit.items()):
        configured = getattr(scenario_file.constants, name)
        print(f"Back-solved {name}: {mean:,.1f} (spread {spread:,.1f}, configured {configured:,.1f})")


def process(runner: plugins.basetypes.Runner, args: argparse.Namespace) -> int:
    conf = runner.config.scenario
    if not conf.path:
        raise plugins.errors.ConfigError("scenario.path", "no scenario file configured")
    scenario_file = plugins.configuration.load_scenario_file(conf.path)
    constants, baseline = scenario_file.constants, scenario_file.baseline
    _calibration_check(scenario_file)

    mode = "computed" if conf.computed else "override"
    with plugins.timer.ProgTimer(f"Running {len(scenario_file.specs)} scenario(s) in {mode} growth mode"):
        results = []
        for spec in scenario_file.specs:
            result = plugins.scenarios.run_scenario(
                spec, baseline, constants, scenario_file.coefficients, use_override=not conf.computed
            )
            try:
                effect = plugins.scenarios.relative_gdp_effect(spec, baseline, constants)
                print(f"{spec.name}: GDP {effect:+.1f}% vs '{baseline.name}' over {constants.horizon_years} years, growth {result.gdp_growth:.1f}%")
            except plugins.errors.UndefinedRatioError as e:
                print(f"{spec.name}: growth {result.gdp_growth:.1f}%, no relative GDP effect ({e})")
            results.append(result)

    reference = conf.reference or baseline.name
    comparison = plugins.scenarios.compare_scenarios(results, reference, scenario_file.headline)
    runner.table("table6", plugins.scenarios.table6_frame(results))
    runner.table("table7", plugins.scenarios.table7_frame(results))
    runner.table("figure8", plugins.scenarios.dataset_frame(comparison))
    runner.table(
        "scenario_deltas",
        pandas.DataFrame(
            [(name, variant, delta) for name, deltas in comparison.deltas.items() for variant, delta in deltas.items()],
            columns=["scenario", "variant", "delta"],
        ),
    )
    if conf.svg:
        style = plugins.svgchart.ChartStyle(title="Five-year emigration by sanctions scenario")
        runner.text("figure8.svg", plugins.svgchart.emit_svg_bars(comparison.dataset, style))

    high, low = scenario_file.headline
    if comparison.headline is None:
        print(f"Headline skipped: '{high}' or '{low}' not among the scenarios")
    else:
        print(f"Additional emigrants under '{high}' versus '{low}': {comparison.headline:,.0f}")
    return 0


def register(runner: plugins.basetypes.Runner):
    return plugins.basetypes.Command(process, "scenario", "run", help="Sanctions scenarios (Tables 6-7, Figure 8)")
