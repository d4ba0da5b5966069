"""Exception hierarchy for the sanctions/migration pipeline"""
import typing


class PipelineError(Exception):
    """Base class for every error the pipeline reports to the user"""

    source: typing.Optional[str] = None

    def with_source(self, source: str) -> "PipelineError":
        """Attaches the input file this error was raised for"""
        self.source = source
        return self

    def __str__(self):
        text = super().__str__()
        if self.source:
            return f"{self.source}: {text}"
        return text


class SchemaError(PipelineError):
    def __init__(self, column: str):
        super().__init__(f"Missing required column '{column}'")
        self.column = column


class DuplicateKeyError(PipelineError):
    def __init__(self, key: typing.Tuple):
        super().__init__("Duplicate key %s" % (key,))
        self.key = key


class ParseError(PipelineError):
    def __init__(self, row: int, column: str, value: str):
        super().__init__(f"Non-numeric value {value!r} in row {row}, column '{column}'")
        self.row = row
        self.column = column


class GapError(PipelineError):
    def __init__(self, missing_year: int, what: str = "series"):
        super().__init__(f"Gap in {what}: year {missing_year} is missing")
        self.missing_year = missing_year


class RangeError(PipelineError):
    pass


class UndefinedRatioError(PipelineError):
    pass


class MissingSourceError(PipelineError):
    def __init__(self, destinations: typing.Iterable[str], source: str = "R4V"):
        self.destinations = sorted(destinations)
        super().__init__(f"{source} data missing for covered destination(s): {', '.join(self.destinations)}")


class ExtrapolationError(PipelineError):
    pass


class StructureError(PipelineError):
    def __init__(self, unmatched: typing.Iterable[str]):
        self.unmatched = sorted(unmatched)
        super().__init__(f"Channel tree and leaves do not match: {', '.join(self.unmatched)}")


class OrderingError(PipelineError):
    pass


class DegenerateRegressorError(PipelineError):
    pass


class InsufficientDataError(PipelineError):
    pass


class DomainError(PipelineError):
    pass


class InfeasibleExportsError(PipelineError):
    pass


class LookupFailure(PipelineError):
    pass


class ConfigError(PipelineError):
    def __init__(self, field: str, message: str, line: typing.Optional[int] = None):
        self.field = field
        self.line = line
        where = f"line {line}, " if line else ""
        super().__init__(f"{where}field '{field}': {message}")
