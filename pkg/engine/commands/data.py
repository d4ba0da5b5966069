"""data build: the harmonized emigration series plus the WDI and UN comparison series"""
import argparse
import os
import typing

import plugins.basetypes
import plugins.errors
import plugins.panel_store
import plugins.timer


def _stocks(path: typing.Optional[str], tag: plugins.panel_store.SourceTag) -> typing.List[plugins.panel_store.MigrantStockRecord]:
    if not path:
        return []
    with open(path, encoding="utf-8") as f:
        try:
            return plugins.panel_store.load_stock_records(f, tag)
        except plugins.errors.PipelineError as e:
            raise e.with_source(path)


def _comparison(path: str, columns: dict, country: str, label: str) -> plugins.panel_store.EmigrationSeries:
    with open(path, encoding="utf-8") as f:
        try:
            panel = plugins.panel_store.load_country_panel(f, columns)
            return plugins.panel_store.net_migration_series(panel, country, label)
        except plugins.errors.PipelineError as e:
            raise e.with_source(path)


def process(runner: plugins.basetypes.Runner, args: argparse.Namespace) -> int:
    conf = runner.config.stocks
    if not conf.un:
        raise plugins.errors.ConfigError("stocks.un", "no UN migrant stock file configured")
    if not conf.r4v or not os.path.exists(conf.r4v):
        error = plugins.errors.MissingSourceError(conf.coverage or ["all covered destinations"])
        raise error.with_source(conf.r4v) if conf.r4v else error

    with plugins.timer.ProgTimer("Building emigration series from migrant stocks"):
        tag = plugins.panel_store.SourceTag
        series = [
            plugins.panel_store.build_emigration_series(
                _stocks(conf.un, tag.UN_STOCK),
                _stocks(conf.r4v, tag.R4V),
                _stocks(conf.acs, tag.ACS),
                _stocks(conf.ine, tag.INE),
                conf.coverage,
                end_year=conf.series_end,
            )
        ]
    if conf.wdi_panel:
        series.append(_comparison(conf.wdi_panel, conf.columns, conf.country, "WDI"))
    if conf.un_panel:
        series.append(_comparison(conf.un_panel, conf.columns, conf.country, "UN"))

    for s in series:
        print(f"{s.label}: {s.total():,.0f} emigrants over {s.years[0]}-{s.years[-1]}" if s.years else f"{s.label}: empty")
    runner.table("emigration_series", plugins.panel_store.series_frame(series))
    return 0


def register(runner: plugins.basetypes.Runner):
    return plugins.basetypes.Command(process, "data", "build", help="Build the emigration series (Figure 4 dataset)")
