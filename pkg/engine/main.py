#!/usr/bin/env python3

"""Venezuela collapse toolkit - growth accounting, emigration estimates and sanctions scenarios"""
import argparse
import importlib
import os
import sys
import traceback
import typing
import uuid

import pandas

import plugins.basetypes
import plugins.configuration
import plugins.errors
import plugins.panel_store
import plugins.tables

TOOLKIT_VERSION = "0.1.0"
ENGINE_DIR = os.path.dirname(os.path.abspath(__file__))
DEFAULT_CONFIG = os.path.join(ENGINE_DIR, "sanctions.yaml")


def discover_commands() -> typing.Dict[str, plugins.basetypes.Command]:
    """Imports every module in commands/ and collects what its register() hands back"""
    found = {}
    for command_file in sorted(os.listdir(os.path.join(ENGINE_DIR, "commands"))):
        if command_file.endswith(".py") and not command_file.startswith("_"):
            module = command_file[:-3]
            m = importlib.import_module(f"commands.{module}")
            if hasattr(m, "register"):
                command = m.__getattribute__("register")(None)
                found[command.name] = command
            else:
                print(f"Could not find entry point 'register()' in {command_file}, skipping!")
    return found


def build_parser(commands: typing.Dict[str, plugins.basetypes.Command]) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--config",
        help="Configuration file to load (default: sanctions.yaml next to main.py)",
        default=DEFAULT_CONFIG,
    )
    parser.add_argument("--out", help="Output directory (overrides output.dir)")
    parser.add_argument("--precision", type=int, help="Decimal places in display tables (overrides output.precision)")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    for name, command in sorted(commands.items()):
        cmd_parser = sub.add_parser(name, help=command.help)
        if command.action:
            actions = cmd_parser.add_subparsers(dest="action", metavar="action")
            actions.required = True
            actions.add_parser(command.action, help=command.help)
    return parser


class Runner(plugins.basetypes.Runner):
    """Loads the configuration and dispatches one sub-command"""

    def __init__(self, args: argparse.Namespace, commands: typing.Dict[str, plugins.basetypes.Command]):
        print("==== Venezuela collapse toolkit v/%s ====" % TOOLKIT_VERSION)
        try:
            self.config = plugins.configuration.load_configuration(args.config)
        except AssertionError as e:
            raise plugins.errors.ConfigError("config", str(e)).with_source(args.config)
        if args.out:
            self.config.output.dir = os.path.abspath(args.out)
        if args.precision is not None:
            if not 0 <= args.precision <= 10:
                raise plugins.errors.ConfigError("--precision", "must be between 0 and 10")
            self.config.output.precision = args.precision
        self.commands = commands

    def table(self, name: str, frame: pandas.DataFrame) -> typing.List[str]:
        return plugins.tables.write_table(self.config.output.dir, name, frame, self.config.output.precision)

    def text(self, filename: str, text: str) -> str:
        path = os.path.join(self.config.output.dir, filename)
        plugins.tables.write_text_atomic(path, text)
        print(f"Wrote {path}")
        return path

    def panel(self) -> plugins.panel_store.CountryPanel:
        """The configured country-year panel, with the growth splice applied when one is set"""
        conf = self.config.panel
        if not conf.path:
            raise plugins.errors.ConfigError("panel.path", "no country-year panel configured")
        with open(conf.path, encoding="utf-8") as f:
            try:
                panel = plugins.panel_store.load_country_panel(f, conf.columns)
            except plugins.errors.PipelineError as e:
                raise e.with_source(conf.path)
        if conf.splice:
            with open(conf.splice, encoding="utf-8") as f:
                growth = pandas.read_csv(f, dtype={"country": str})
            for column in ("country", "year", "growth_pct"):
                if column not in growth.columns:
                    raise plugins.errors.SchemaError(column).with_source(conf.splice)
            rows = growth[growth["country"] == conf.splice_country]
            panel = plugins.panel_store.splice_growth_rates(
                panel, conf.splice_country, {int(r.year): float(r.growth_pct) for r in rows.itertuples()}
            )
        return panel

    def run(self, args: argparse.Namespace) -> int:
        return self.commands[args.command].exec(self, args) or 0


def main(argv: typing.Optional[typing.List[str]] = None) -> int:
    commands = discover_commands()
    args = build_parser(commands).parse_args(argv)
    try:
        runner = Runner(args, commands)
        return runner.run(args)
    except plugins.errors.PipelineError as e:
        sys.stderr.write("Error: %s\n" % e)
        return 1
    except OSError as e:
        sys.stderr.write("Error: %s\n" % e)
        return 1
    except:  # This is a broad exception on purpose!
        exc_type, exc_value, exc_traceback = sys.exc_info()
        err = "\n".join(traceback.format_exception(exc_type, exc_value, exc_traceback))
        # Every line of the traceback carries the error ID, for easy grepping.
        eid = str(uuid.uuid4())[:18]
        sys.stderr.write("Command '%s' got into trouble (%s): \n" % (args.command, eid))
        for line in err.split("\n"):
            sys.stderr.write("%s: %s\n" % (eid, line))
        return 2


if __name__ == "__main__":
    sys.exit(main())
