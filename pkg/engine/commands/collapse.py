"""collapse rank: largest GDP per capita collapses since 1950 (Table 2)"""
import argparse

import pandas

import plugins.basetypes
import plugins.errors
import plugins.growth_accounting
import plugins.timer


def _flags(path) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as f:
        frame = pandas.read_csv(f, dtype=str, keep_default_na=False)
    for column in ("country", "classification"):
        if column not in frame.columns:
            raise plugins.errors.SchemaError(column).with_source(path)
    return {r.country.strip(): r.classification.strip() for r in frame.itertuples()}


def process(runner: plugins.basetypes.Runner, args: argparse.Namespace) -> int:
    conf = runner.config.collapse
    panel = runner.panel()
    with plugins.timer.ProgTimer(f"Ranking collapses across {len(panel.countries())} countries"):
        rows = plugins.growth_accounting.rank_collapses(panel, _flags(conf.flags), conf.top_k)
    for row in rows[:3]:
        print(f"#{row.rank} {row.country} {row.peak_year}-{row.trough_year}: {row.metrics.trough_to_peak:.1f}%")
    runner.table("table2", plugins.growth_accounting.collapse_frame(rows))
    return 0


def register(runner: plugins.basetypes.Runner):
    return plugins.basetypes.Command(process, "collapse", "rank", help="Rank the largest GDP per capita collapses (Table 2)")
