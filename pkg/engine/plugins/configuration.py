from __future__ import annotations
import dataclasses
import os
import typing

import yaml

import plugins.econometrics
import plugins.errors
import plugins.growth_accounting
import plugins.panel_store
import plugins.scenarios

DEFAULT_FILTERS = ["FULL", "CRISIS", "LARGE_CRISIS"]


def _resolve(base: str, path: typing.Optional[str], what: str, must_exist: bool = True) -> typing.Optional[str]:
    """Resolves a configured path against the config file's directory"""
    if not path:
        return None
    assert isinstance(path, str), f"{what} must be a file path"
    full = os.path.normpath(os.path.join(base, os.path.expanduser(path)))
    if must_exist:
        assert os.path.exists(full), f"{what} does not exist: {full}"
    return full


def _year_pair(value, what: str) -> typing.Tuple[int, int]:
    assert isinstance(value, (list, tuple)) and len(value) == 2, f"{what} must be a [start, end] pair"
    return int(value[0]), int(value[1])


class OutputConfig:
    def __init__(self, subyaml: dict, base: str):
        self.dir: str = _resolve(base, subyaml.get("dir", "output"), "Output directory", must_exist=False)
        self.precision: int = int(subyaml.get("precision", 1))
        assert 0 <= self.precision <= 10, "Output precision must be between 0 and 10 decimals!"


class PanelConfig:
    def __init__(self, subyaml: dict, base: str):
        self.path: typing.Optional[str] = _resolve(base, subyaml.get("path"), "Panel file")
        self.columns: typing.Dict[str, str] = dict(subyaml.get("columns", {}))
        self.splice: typing.Optional[str] = _resolve(base, subyaml.get("splice"), "Growth splice file")
        self.splice_country: str = subyaml.get("splice_country", "VEN")
        unknown = set(self.columns) - set(plugins.panel_store.PANEL_COLUMNS)
        assert not unknown, f"Unknown logical panel column(s): {', '.join(sorted(unknown))}"


class StocksConfig:
    def __init__(self, subyaml: dict, base: str):
        self.un: typing.Optional[str] = _resolve(base, subyaml.get("un"), "UN migrant stock file")
        # A missing R4V file is reported by `data build` as a missing source, not at load
        self.r4v: typing.Optional[str] = _resolve(base, subyaml.get("r4v"), "R4V stock file", must_exist=False)
        self.acs: typing.Optional[str] = _resolve(base, subyaml.get("acs"), "ACS stock file")
        self.ine: typing.Optional[str] = _resolve(base, subyaml.get("ine"), "INE stock file")
        self.coverage: typing.List[str] = [str(c) for c in subyaml.get("coverage", [])]
        self.wdi_panel: typing.Optional[str] = _resolve(base, subyaml.get("wdi_panel"), "WDI panel file")
        self.un_panel: typing.Optional[str] = _resolve(base, subyaml.get("un_panel"), "UN panel file")
        self.columns: typing.Dict[str, str] = dict(subyaml.get("columns", {}))
        self.country: str = subyaml.get("country", "VEN")
        self.series_end: typing.Optional[int] = subyaml.get("series_end")
        if self.series_end is not None:
            self.series_end = int(self.series_end)
        assert isinstance(self.coverage, list), "Stock coverage must be a list of destination codes"


@dataclasses.dataclass(frozen=True)
class PeriodDefinition:
    label: str
    start: int
    end: int


class DecomposeConfig:
    def __init__(self, subyaml: dict, base: str):
        shares = subyaml.get("shares", {})
        try:
            self.shares = plugins.growth_accounting.FactorShares(**shares)
        except TypeError as e:
            raise AssertionError(f"Unknown factor share setting: {e}")
        self.series: typing.Optional[str] = _resolve(base, subyaml.get("series"), "Level series file")
        self.rates: typing.List[plugins.growth_accounting.PeriodGrowthRates] = []
        self.periods: typing.List[PeriodDefinition] = []
        periods = subyaml.get("periods", [])
        if isinstance(periods, str):
            with open(_resolve(base, periods, "Growth period file"), encoding="utf-8") as f:
                periods = yaml.safe_load(f) or []
        assert isinstance(periods, list), "decompose.periods must be a list of periods or a file holding one"
        for entry in periods:
            assert isinstance(entry, dict) and entry.get("label"), "Every period needs a label"
            if "start" in entry:
                assert self.series, f"Period {entry['label']} is given as years but no level series is configured"
                self.periods.append(PeriodDefinition(str(entry["label"]), int(entry["start"]), int(entry["end"])))
            else:
                self.rates.append(
                    plugins.growth_accounting.PeriodGrowthRates(
                        str(entry["label"]), float(entry["g_Y"]), float(entry["g_K"]), float(entry["g_H"]), float(entry["g_M"])
                    )
                )
        self.channels: typing.Optional[str] = _resolve(base, subyaml.get("channels"), "Channel leaf file")
        self.tree: typing.Optional[str] = _resolve(base, subyaml.get("tree"), "Channel tree file")
        self.sanctions_share: float = float(subyaml.get("sanctions_share", 0.503))
        self.share_estimates: typing.Optional[dict] = subyaml.get("share_estimates")
        if self.share_estimates is not None:
            assert set(self.share_estimates) == {"group_a", "group_b"}, "share_estimates needs group_a and group_b lists"


class EstimateConfig:
    def __init__(self, subyaml: dict, base: str):
        self.filters: typing.List[plugins.econometrics.SampleFilter] = [
            plugins.econometrics.SampleFilter.parse(f) for f in subyaml.get("filters", DEFAULT_FILTERS)
        ]
        episode = subyaml.get("episode", {})
        self.episode_country: str = episode.get("country", "VEN")
        self.episode_base: typing.Tuple[int, int] = _year_pair(episode.get("base", [2011, 2013]), "Episode base window")
        self.episode_crisis: typing.Tuple[int, int] = _year_pair(episode.get("crisis", [2017, 2019]), "Episode crisis window")
        self.episode_flows: typing.Optional[str] = _resolve(base, episode.get("flows"), "Episode flow series")
        self.effects: bool = bool(subyaml.get("effects", False))


class CollapseConfig:
    def __init__(self, subyaml: dict, base: str):
        self.flags: typing.Optional[str] = _resolve(base, subyaml.get("flags"), "Conflict flag file")
        self.top_k: int = int(subyaml.get("top_k", 15))
        assert self.top_k >= 1, "collapse.top_k must be at least 1"


class OilConfig:
    def __init__(self, subyaml: dict, base: str):
        self.path: typing.Optional[str] = _resolve(base, subyaml.get("path"), "Oil production file")
        self.breakpoints: typing.List[int] = [int(b) for b in subyaml.get("breakpoints", [])]
        self.windows: typing.List[typing.Tuple[int, int]] = [
            _year_pair(w, "Jump window") for w in subyaml.get("windows", [])
        ]


class ScenarioConfig:
    def __init__(self, subyaml: dict, base: str):
        self.path: typing.Optional[str] = _resolve(base, subyaml.get("path"), "Scenario file")
        self.computed: bool = bool(subyaml.get("computed", False))
        self.svg: bool = bool(subyaml.get("svg", True))
        self.reference: typing.Optional[str] = subyaml.get("reference")


class Configuration:

    def __init__(self, yml: dict, base: str = "."):
        yml = yml or {}
        self.base: str = base
        self.output: OutputConfig = OutputConfig(yml.get("output", {}), base)
        self.panel: PanelConfig = PanelConfig(yml.get("panel", {}), base)
        self.stocks: StocksConfig = StocksConfig(yml.get("stocks", {}), base)
        self.decompose: DecomposeConfig = DecomposeConfig(yml.get("decompose", {}), base)
        self.estimate: EstimateConfig = EstimateConfig(yml.get("estimate", {}), base)
        self.collapse: CollapseConfig = CollapseConfig(yml.get("collapse", {}), base)
        self.oil: OilConfig = OilConfig(yml.get("oil", {}), base)
        self.scenario: ScenarioConfig = ScenarioConfig(yml.get("scenario", {}), base)


def load_configuration(path: str) -> Configuration:
    with open(path, encoding="utf-8") as f:
        yml = yaml.safe_load(f)
    return Configuration(yml, os.path.dirname(os.path.abspath(path)))


class ScenarioFile:
    """Scenario definitions read from JSON (or YAML). Schema problems raise ConfigError with the
    dotted field path and the line it sits on."""

    constants: plugins.scenarios.CalibrationConstants
    coefficients: plugins.scenarios.MigrationCoefficients
    specs: typing.List[plugins.scenarios.ScenarioSpec]
    baseline: plugins.scenarios.ScenarioSpec
    headline: typing.Tuple[str, str]
    published: typing.List[plugins.scenarios.PublishedRow]

    def __init__(self, text: str):
        try:
            self.root = yaml.compose(text)
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            raise plugins.errors.ConfigError("<document>", str(getattr(e, "problem", e)), mark.line + 1 if mark else None)
        if not isinstance(data, dict):
            raise plugins.errors.ConfigError("<document>", "top level must be an object", 1)

        self.constants = self._build(
            plugins.scenarios.CalibrationConstants, self._section(data, "constants", {}), ("constants",)
        )
        self.coefficients = self._build(
            plugins.scenarios.MigrationCoefficients, self._section(data, "coefficients", {}), ("coefficients",)
        )
        scenarios = data.get("scenarios")
        if not isinstance(scenarios, list) or not scenarios:
            raise plugins.errors.ConfigError("scenarios", "must be a nonempty list", self.line_of(("scenarios",)))
        self.specs = []
        for i, entry in enumerate(scenarios):
            spec = self._build(plugins.scenarios.ScenarioSpec, entry, ("scenarios", i))
            if any(s.name == spec.name for s in self.specs):
                raise plugins.errors.ConfigError(f"scenarios[{i}].name", f"duplicate scenario '{spec.name}'", self.line_of(("scenarios", i, "name")))
            self.specs.append(spec)

        names = [s.name for s in self.specs]
        baseline = data.get("baseline", names[0])
        if baseline not in names:
            raise plugins.errors.ConfigError("baseline", f"unknown scenario '{baseline}'", self.line_of(("baseline",)))
        self.baseline = self.specs[names.index(baseline)]

        headline = self._section(data, "headline", {})
        self.headline = (
            str(headline.get("high", plugins.scenarios.DEFAULT_HEADLINE[0])),
            str(headline.get("low", plugins.scenarios.DEFAULT_HEADLINE[1])),
        )
        published = data.get("published", [])
        if not isinstance(published, list):
            raise plugins.errors.ConfigError("published", "must be a list", self.line_of(("published",)))
        self.published = [self._build(plugins.scenarios.PublishedRow, row, ("published", i)) for i, row in enumerate(published)]

    def line_of(self, path: typing.Sequence[typing.Union[str, int]]) -> typing.Optional[int]:
        """1-based line of the node at `path`, or of its deepest existing ancestor"""
        node = self.root
        for step in path:
            if isinstance(node, yaml.MappingNode):
                match = [value for key, value in node.value if key.value == step]
                if not match:
                    break
                node = match[0]
            elif isinstance(node, yaml.SequenceNode) and isinstance(step, int) and step < len(node.value):
                node = node.value[step]
            else:
                break
        return node.start_mark.line + 1 if node is not None else None

    def _section(self, data: dict, name: str, default):
        value = data.get(name, default)
        if not isinstance(value, dict):
            raise plugins.errors.ConfigError(name, "must be an object", self.line_of((name,)))
        return value

    def _build(self, cls, entry, path: typing.Tuple):
        where = _dotted(path)
        if not isinstance(entry, dict):
            raise plugins.errors.ConfigError(where, "must be an object", self.line_of(path))
        fields = {f.name: f for f in dataclasses.fields(cls)}
        for key, value in entry.items():
            if key not in fields:
                raise plugins.errors.ConfigError(f"{where}.{key}", "unknown field", self.line_of(path + (key,)))
            expected = fields[key].type
            if expected in (float, int, typing.Optional[float]) and value is not None and (isinstance(value, bool) or not isinstance(value, (int, float))):
                raise plugins.errors.ConfigError(f"{where}.{key}", f"expected a number, got {value!r}", self.line_of(path + (key,)))
            if expected is bool and not isinstance(value, bool):
                raise plugins.errors.ConfigError(f"{where}.{key}", f"expected true or false, got {value!r}", self.line_of(path + (key,)))
            if expected is str and not isinstance(value, str):
                raise plugins.errors.ConfigError(f"{where}.{key}", f"expected a string, got {value!r}", self.line_of(path + (key,)))
        missing = [
            name for name, f in fields.items()
            if f.default is dataclasses.MISSING and name not in entry
        ]
        if missing:
            raise plugins.errors.ConfigError(f"{where}.{missing[0]}", "required field is missing", self.line_of(path))
        try:
            return cls(**entry)
        except plugins.errors.DomainError as e:
            raise plugins.errors.ConfigError(where, str(e), self.line_of(path))


def _dotted(path: typing.Sequence[typing.Union[str, int]]) -> str:
    text = ""
    for step in path:
        text += f"[{step}]" if isinstance(step, int) else (f".{step}" if text else step)
    return text


def load_scenario_file(path: str) -> ScenarioFile:
    with open(path, encoding="utf-8") as f:
        text = f.read()
    try:
        return ScenarioFile(text)
    except plugins.errors.PipelineError as e:
        raise e.with_source(path)
