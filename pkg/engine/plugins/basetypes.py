from __future__ import annotations
import typing
import plugins.configuration


class Runner:
    """Base runner class for the suite"""
    config:     'plugins.configuration.Configuration'
    commands:   typing.Dict[str, Command]


class Command:
    """CLI sub-command: `name` plus an optional `action` word (`data build`, `scenario run`)"""
    exec: typing.Callable
    name: str
    action: typing.Optional[str]
    help: str

    def __init__(self, executor, name: str, action: typing.Optional[str] = None, help: str = ""):
        self.exec = executor
        self.name = name
        self.action = action
        self.help = help
