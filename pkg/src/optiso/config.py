"""Optimization levels, fine-grained options, configurations and the driver contract."""

from __future__ import annotations

import abc
import enum
import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .errors import InvalidConfiguration, LevelUnknown, ParseError

NEGATION_PREFIX = "-fno-"


@dataclass(frozen=True, order=True)
class OptimizationLevel:
    ordinal: int
    label: str

    def __post_init__(self):
        if not self.label:
            raise ValueError("optimization level label must be non-empty")

    def __str__(self):
        return self.label

    @property
    def flag(self):
        return f"-{self.label}"


@dataclass(frozen=True)
class FineGrainedOption:
    """An optimizer flag, stored without the ``-f`` / ``-fno-`` prefix."""

    name: str
    index: int

    def __str__(self):
        return self.name

    @property
    def negated_flag(self):
        return NEGATION_PREFIX + self.name


@dataclass(frozen=True)
class OptionSpace:
    level: OptimizationLevel
    options: tuple[FineGrainedOption, ...]

    def __post_init__(self):
        object.__setattr__(self, "options", tuple(self.options))
        names = [o.name for o in self.options]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate option names in space for {self.level}")
        if [o.index for o in self.options] != list(range(len(self.options))):
            raise ValueError("option indices must be 0..n-1 in enumeration order")

    @classmethod
    def from_names(cls, level: OptimizationLevel, names: Iterable[str]) -> "OptionSpace":
        return cls(level, tuple(FineGrainedOption(n, i) for i, n in enumerate(names)))

    def __len__(self):
        return len(self.options)

    def __iter__(self):
        return iter(self.options)

    def __contains__(self, option):
        if isinstance(option, str):
            return any(o.name == option for o in self.options)
        return option in self.options

    def option(self, name: str) -> FineGrainedOption:
        for o in self.options:
            if o.name == name:
                return o
        raise KeyError(f"option {name!r} is not enabled at {self.level}")

    def default(self) -> "Configuration":
        return Configuration(self)

    def configure(self, disabled: Iterable = ()) -> "Configuration":
        """Configuration with the given options (objects or names) disabled."""
        opts = [self.option(o) if isinstance(o, str) else o for o in disabled]
        return Configuration(self, frozenset(opts))

    def serialize(self) -> str:
        return "\n".join([self.level.label] + [o.name for o in self.options]) + "\n"


class Configuration:
    """An optimization level plus the set of its default options that are disabled.

    Equality and hashing only consider the level and the disabled set.
    """

    __slots__ = ("space", "disabled")

    def __init__(self, space: OptionSpace, disabled: Iterable[FineGrainedOption] = frozenset()):
        disabled = frozenset(disabled)
        stray = [o for o in disabled if o not in space.options]
        if stray:
            names = ", ".join(sorted(str(o) for o in stray))
            raise InvalidConfiguration(f"options not enabled at {space.level}: {names}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "disabled", disabled)

    def __setattr__(self, name, value):
        raise AttributeError("Configuration is immutable")

    @property
    def level(self) -> OptimizationLevel:
        return self.space.level

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.level == other.level and self.disabled == other.disabled

    def __hash__(self):
        return hash((self.level, self.disabled))

    def __repr__(self):
        return f"Configuration({self.format()!r})"

    def sorted_disabled(self) -> list[FineGrainedOption]:
        return sorted(self.disabled, key=lambda o: o.index)

    def enabled(self) -> list[FineGrainedOption]:
        return [o for o in self.space.options if o not in self.disabled]

    def disable(self, *options) -> "Configuration":
        extra = [self.space.option(o) if isinstance(o, str) else o for o in options]
        return Configuration(self.space, self.disabled | frozenset(extra))

    def flags(self) -> list[str]:
        return [self.level.flag] + [o.negated_flag for o in self.sorted_disabled()]

    def format(self) -> str:
        return " ".join(self.flags())

    def digest(self, length=12) -> str:
        return hashlib.sha1(self.format().encode()).hexdigest()[:length]


def parse_configuration(text: str, spaces) -> Configuration:
    """Inverse of :meth:`Configuration.format`.

    *spaces* maps level labels to :class:`OptionSpace` (a driver works too,
    through its ``option_space`` method).
    """
    tokens = text.split()
    if not tokens or not tokens[0].startswith("-") or tokens[0].startswith(NEGATION_PREFIX):
        raise ParseError(f"configuration must start with a level flag: {text!r}")
    label = tokens[0][1:]
    if hasattr(spaces, "option_space"):
        space = spaces.option_space(label)
    else:
        try:
            space = spaces[label]
        except KeyError:
            raise LevelUnknown(label) from None
    disabled = []
    for tok in tokens[1:]:
        if not tok.startswith(NEGATION_PREFIX):
            raise ParseError(f"unexpected token {tok!r}")
        try:
            disabled.append(space.option(tok[len(NEGATION_PREFIX):]))
        except KeyError as exc:
            raise InvalidConfiguration(str(exc.args[0])) from None
    return Configuration(space, disabled)


class OutcomeStatus(str, enum.Enum):
    COMPILER_CRASH = "CompilerCrash"
    RUN_ABORT = "RunAbort"
    RUN_OK = "RunOk"


def output_digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass(frozen=True)
class CompilationOutcome:
    status: OutcomeStatus
    exit_code: int = 0
    output_digest: str = ""

    def __post_init__(self):
        object.__setattr__(self, "status", OutcomeStatus(self.status))
        if self.status is not OutcomeStatus.RUN_OK and self.output_digest:
            raise ValueError("only RunOk outcomes carry an output digest")

    @classmethod
    def ok(cls, stdout: bytes = b"", exit_code: int = 0) -> "CompilationOutcome":
        return cls(OutcomeStatus.RUN_OK, exit_code, output_digest(stdout))

    def to_dict(self):
        return {"status": self.status.value, "exit_code": self.exit_code,
                "output_digest": self.output_digest}

    @classmethod
    def from_dict(cls, d) -> "CompilationOutcome":
        status = OutcomeStatus(d["status"])
        digest = d.get("output_digest")
        if digest is None:
            digest = output_digest(d.get("stdout", "").encode()) if status is OutcomeStatus.RUN_OK else ""
        return cls(status, int(d.get("exit_code", 0)), digest)

    def __str__(self):
        if self.status is OutcomeStatus.RUN_OK:
            return f"{self.status.value}(exit={self.exit_code}, out={self.output_digest[:8]})"
        return f"{self.status.value}(exit={self.exit_code})"


@dataclass(frozen=True)
class TestProgram:
    """The bug-triggering program handed to the compiler."""

    __test__ = False  # not a pytest class

    path: Optional[Path] = None
    name: str = "test.c"

    @classmethod
    def from_path(cls, path) -> "TestProgram":
        path = Path(path)
        return cls(path, path.name)


class CompilerDriver(abc.ABC):
    """The single boundary between the localization pipeline and a compiler."""

    kind = "abstract"

    @abc.abstractmethod
    def levels(self) -> list[OptimizationLevel]:
        ...

    @abc.abstractmethod
    def enabled_options(self, level: OptimizationLevel) -> OptionSpace:
        ...

    @abc.abstractmethod
    def compile_and_run(self, program: TestProgram, conf: Configuration, want_coverage: bool = True):
        """Return ``(CompilationOutcome, CoverageSpectrum)``."""

    def level(self, label: str) -> OptimizationLevel:
        if isinstance(label, OptimizationLevel):
            label = label.label
        for lvl in self.levels():
            if lvl.label == label:
                return lvl
        raise LevelUnknown(f"unknown optimization level {label!r}")

    def option_space(self, level) -> OptionSpace:
        return self.enabled_options(self.level(level))

    def source_files(self):
        """Every compiler source file the driver knows about, or None if unknown."""
        return None

    def describe(self) -> dict:
        return {"kind": self.kind}


def driver_levels(driver: CompilerDriver) -> list[OptimizationLevel]:
    levels = list(driver.levels())
    if not levels:
        raise LevelUnknown("driver reports no optimization levels")
    ordinals = [lvl.ordinal for lvl in levels]
    if ordinals != sorted(set(ordinals)):
        raise ValueError("driver levels must be strictly ordered by ordinal")
    return levels


def enabled_options(driver: CompilerDriver, level) -> OptionSpace:
    return driver.enabled_options(driver.level(level))


def compile_and_run(driver: CompilerDriver, program: TestProgram, conf: Configuration,
                    want_coverage: bool = True):
    space = driver.enabled_options(driver.level(conf.level.label))
    if not conf.disabled <= set(space.options):
        raise InvalidConfiguration(f"{conf.format()} is not valid for this driver")
    return driver.compile_and_run(program, conf, want_coverage)
