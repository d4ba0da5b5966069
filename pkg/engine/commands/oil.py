"""oil segments: mean monthly decline of oil production between breakpoints and drops across jump windows"""
import argparse

import pandas

import plugins.basetypes
import plugins.econometrics
import plugins.errors
import plugins.timer


def process(runner: plugins.basetypes.Runner, args: argparse.Namespace) -> int:
    conf = runner.config.oil
    if not conf.path:
        raise plugins.errors.ConfigError("oil.path", "no oil production file configured")
    with open(conf.path, encoding="utf-8") as f:
        frame = pandas.read_csv(f)
    for column in ("month", "production"):
        if column not in frame.columns:
            raise plugins.errors.SchemaError(column).with_source(conf.path)
    with plugins.timer.ProgTimer(f"Segmenting {len(frame)} months of oil production"):
        try:
            report = plugins.econometrics.segment_decline_rates(
                frame["production"].astype(float).tolist(), conf.breakpoints, conf.windows
            )
        except plugins.errors.PipelineError as e:
            raise e.with_source(conf.path)
    months = frame["month"].astype(str).tolist()
    for segment in report.segments:
        print(f"{months[segment.start]} to {months[segment.end]}: {segment.mean_log_change:.2f} log points per month")
    runner.table("oil_segments", plugins.econometrics.segments_frame(report))
    return 0


def register(runner: plugins.basetypes.Runner):
    return plugins.basetypes.Command(process, "oil", "segments", help="Segmented oil production decline rates")
