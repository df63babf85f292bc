"""Exception hierarchy.

Every error carries the process exit code the CLI maps it to:
1 for configuration problems, 2 for generation failures, 3 for I/O.
"""

from __future__ import annotations


class SynthCensusError(Exception):
    exit_code = 1


class ConfigError(SynthCensusError):
    exit_code = 1


class GenerationError(SynthCensusError):
    exit_code = 2


class IoFailure(SynthCensusError):
    exit_code = 3


# descriptor / script
class MalformedDocument(ConfigError):
    pass


class UnknownElement(ConfigError):
    pass


class UnknownAttribute(ConfigError):
    pass


class MissingRequiredAttribute(ConfigError):
    pass


class InvalidCount(ConfigError):
    pass


class DuplicateAttributeName(ConfigError):
    pass


class DuplicateVariableName(ConfigError):
    pass


class UndeclaredVariable(ConfigError):
    pass


class UnboundColumn(ConfigError):
    pass


class EmptyExpression(ConfigError):
    pass


class ScriptSyntaxError(ConfigError):
    pass


class UnboundVariable(GenerationError):
    pass


class UnknownField(GenerationError):
    pass


# weight tables and fixtures
class WeightTableError(ConfigError):
    """Raised while parsing a weight table; ``source`` and ``line`` locate it."""

    def __init__(self, message: str, *, source: str | None = None, line: int | None = None):
        self.source = source
        self.line = line
        where = ""
        if source is not None:
            where = source if line is None else f"{source}:{line}"
        elif line is not None:
            where = f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class EmptyTable(WeightTableError):
    pass


class NonIntegerWeight(WeightTableError):
    pass


class NegativeWeight(WeightTableError):
    pass


class DuplicateCategory(WeightTableError):
    pass


class AllWeightsZero(WeightTableError):
    pass


class MissingGroupFile(ConfigError):
    pass


class BadFileNamePattern(ConfigError):
    pass


class AgeOutOfRange(ConfigError):
    pass


class FixtureMissing(GenerationError):
    pass


# plan
class CyclicDependency(ConfigError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("cyclic dependency: " + " -> ".join(cycle))


class UnknownGenerator(ConfigError):
    pass


class MissingDependency(ConfigError):
    pass


# fidelity
class UnknownColumn(ConfigError):
    pass


class UnparsableAge(ConfigError):
    pass


class EmptyHistogram(ConfigError):
    pass


class InsufficientCells(ConfigError):
    pass


class UnsupportedConsumer(ConfigError):
    pass
