"""decompose: period growth accounting (Table 3) and the channel tree of the 2012-2020 collapse (Table 4)"""
import argparse
import math

import pandas
import yaml

import plugins.basetypes
import plugins.errors
import plugins.growth_accounting
import plugins.timer

ADDITIVITY_TOLERANCE = 1e-9
LEVEL_COLUMNS = ("year", "gdp", "capital", "human_capital", "imports")


def _level_series(path: str) -> pandas.DataFrame:
    with open(path, encoding="utf-8") as f:
        frame = pandas.read_csv(f)
    for column in LEVEL_COLUMNS:
        if column not in frame.columns:
            raise plugins.errors.SchemaError(column).with_source(path)
    return frame.set_index("year").sort_index()


def _load_yaml(path: str):
    with open(path, encoding="utf-8") as f:
        return yaml.safe_load(f)


def _additive(values, total: float) -> bool:
    return abs(math.fsum(values) - total) <= ADDITIVITY_TOLERANCE * max(1.0, abs(total))


def _table3(runner: plugins.basetypes.Runner):
    conf = runner.config.decompose
    rates = list(conf.rates)
    if conf.periods:
        series = _level_series(conf.series)
        for period in conf.periods:
            try:
                rates.append(plugins.growth_accounting.period_rates(series, period.label, period.start, period.end))
            except plugins.errors.PipelineError as e:
                raise e.with_source(conf.series)
    if not rates:
        print("No growth-accounting periods configured, skipping Table 3")
        return
    rows = []
    failed = []
    for r in rates:
        conv = plugins.growth_accounting.decompose_conventional(r, conf.shares)
        adjusted = plugins.growth_accounting.decompose_import_adjusted(conv, r, conf.shares)
        for decomposition in (conv, adjusted):
            if not _additive(decomposition.contributions.values(), r.g_Y):
                failed.append(r.label)
        rows.append((r, conv, adjusted))
    if failed:
        print(f"Additivity check FAILED for: {', '.join(sorted(set(failed)))}")
    else:
        print(f"Additivity check passed for {len(rows)} period(s)")
    runner.table("table3", plugins.growth_accounting.decomposition_frame(rows))


def _table4(runner: plugins.basetypes.Runner):
    conf = runner.config.decompose
    if not conf.channels:
        print("No channel leaf file configured, skipping Table 4")
        return
    leaves = _load_yaml(conf.channels) or {}
    if not isinstance(leaves, dict):
        raise plugins.errors.ConfigError("channels", "leaf file must map leaf keys to values").with_source(conf.channels)
    tree = plugins.growth_accounting.load_channel_tree(conf.tree) if conf.tree else None
    share = conf.sanctions_share
    if conf.share_estimates:
        share = plugins.growth_accounting.sanctions_production_share(
            conf.share_estimates["group_a"], conf.share_estimates["group_b"]
        )
        print(f"Sanctions share of the production decline: {share:.3f}")
    try:
        root = plugins.growth_accounting.channel_decompose(leaves, tree, share)
    except plugins.errors.PipelineError as e:
        raise e.with_source(conf.channels)
    broken = [node.name for _, node in root.walk() if node.children and not _additive((c.value for c in node.children), node.value)]
    aggregates = plugins.growth_accounting.channel_aggregates(root)
    if broken or not _additive((aggregates["sanctions"], aggregates["other"]), aggregates["total"]):
        print(f"Additivity check FAILED for: {', '.join(broken) or 'aggregates'}")
    else:
        print("Additivity check passed for the channel tree")
    print(
        "Aggregates: sanctions %.1f, other %.1f, total %.1f"
        % (aggregates["sanctions"], aggregates["other"], aggregates["total"])
    )
    runner.table("table4", plugins.growth_accounting.channel_frame(root))


def process(runner: plugins.basetypes.Runner, args: argparse.Namespace) -> int:
    with plugins.timer.ProgTimer("Decomposing growth"):
        _table3(runner)
        _table4(runner)
    return 0


def register(runner: plugins.basetypes.Runner):
    return plugins.basetypes.Command(process, "decompose", help="Growth accounting and channel decomposition (Tables 3-4)")
