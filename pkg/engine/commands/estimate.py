"""estimate: emigration response to GDP growth across sample filters plus the single-country episode row (Table 5)"""
import argparse
import typing

import pandas

import plugins.basetypes
import plugins.econometrics
import plugins.errors
import plugins.panel_store
import plugins.timer


def _episode_flows(path: typing.Optional[str]) -> typing.Optional[plugins.panel_store.EmigrationSeries]:
    """First series of an emigration_series table written by `data build`"""
    if not path:
        return None
    with open(path, encoding="utf-8") as f:
        frame = pandas.read_csv(f)
    for column in ("year", "flow_persons", "source_label"):
        if column not in frame.columns:
            raise plugins.errors.SchemaError(column).with_source(path)
    if frame.empty:
        raise plugins.errors.InsufficientDataError("Episode flow series is empty").with_source(path)
    label = frame["source_label"].iloc[0]
    rows = frame[frame["source_label"] == label]
    return plugins.panel_store.EmigrationSeries(
        str(label), {int(r.year): float(r.flow_persons) for r in rows.itertuples()}
    )


def process(runner: plugins.basetypes.Runner, args: argparse.Namespace) -> int:
    conf = runner.config.estimate
    panel = runner.panel()
    rows = []
    full_estimate = None
    with plugins.timer.ProgTimer("Estimating fixed-effects emigration response"):
        observations = plugins.econometrics.derive_regression_panel(panel)
        print(f"Regression panel: {len(observations)} country-years")
        for sample in conf.filters:
            kept = plugins.econometrics.apply_filter(observations, sample)
            print(f"{sample.label}: {len(kept)} country-years after filtering")
            try:
                outcome = plugins.econometrics.fe_within_estimate(kept)
                if sample.kind is plugins.econometrics.FilterKind.FULL:
                    full_estimate = outcome
            except plugins.errors.PipelineError as e:
                print(f"{sample.label}: {e}")
                outcome = e
            rows.append((sample.label, outcome))

        base, crisis = conf.episode_base, conf.episode_crisis
        label = f"{conf.episode_country} {base[0]}-{base[1]} to {crisis[0]}-{crisis[1]}"
        try:
            series = plugins.econometrics.episode_series(panel, conf.episode_country, _episode_flows(conf.episode_flows))
            outcome = plugins.econometrics.episode_ratio_coefficient(series, base, crisis)
        except plugins.errors.PipelineError as e:
            print(f"{label}: {e}")
            outcome = e
        rows.append((label, outcome))

    frame = plugins.econometrics.estimation_frame(rows)
    for record in frame.itertuples():
        if not record.error:
            print(f"{record.sample}: {record.coefficient:.3f}")
    runner.table("table5", frame)
    if conf.effects and full_estimate is not None:
        runner.table("effects", plugins.econometrics.effects_frame(full_estimate))
    return 0


def register(runner: plugins.basetypes.Runner):
    return plugins.basetypes.Command(process, "estimate", help="Fixed-effects emigration estimates (Table 5)")
