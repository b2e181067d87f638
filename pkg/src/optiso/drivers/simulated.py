"""A deterministic stand-in compiler driven by a declarative bug model."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..config import (
    CompilationOutcome,
    CompilerDriver,
    Configuration,
    OptimizationLevel,
    OptionSpace,
    TestProgram,
)
from ..coverage import CoverageSpectrum
from ..errors import InvalidConfiguration, LevelUnknown, ParseError, ValidationError
from .predicate import LevelAtLeast, Opt, atoms, parse_predicate

REQUIRED_KEYS = ("levels", "options", "files", "base_coverage", "option_coverage",
                 "bug_predicate", "faulty_files", "pass_outcome", "fail_outcome")


@dataclass
class BugModel:
    levels: list[str]
    option_space: dict[str, list[str]]
    file_table: list[str]
    base_coverage: dict[str, dict[str, list[int]]]
    option_coverage: dict[str, list[tuple[str, int]]]
    bug_predicate: str
    faulty_files: set[str]
    pass_outcome: CompilationOutcome
    fail_outcome: CompilationOutcome
    name: str = "model"
    description: str = ""
    predicate: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.predicate = parse_predicate(self.bug_predicate)
        self.validate()
        self.ordinals = {label: i for i, label in enumerate(self.levels)}
        universe = set()
        for per_file in self.base_coverage.values():
            for f, lines in per_file.items():
                universe.update((f, int(n)) for n in lines)
        for entries in self.option_coverage.values():
            universe.update((f, int(n)) for f, n in entries)
        self.universe = frozenset(universe)

    def validate(self):
        if not self.levels:
            raise ValidationError("model declares no optimization levels")
        if len(set(self.levels)) != len(self.levels):
            raise ValidationError("level labels must be unique")
        for label in self.option_space:
            if label not in self.levels:
                raise ValidationError(f"options declared for unknown level {label!r}")
        for label, names in self.option_space.items():
            if len(set(names)) != len(names):
                raise ValidationError(f"duplicate options at level {label!r}")
        known = set().union(*map(set, self.option_space.values())) if self.option_space else set()
        files = set(self.file_table)
        for opt, entries in self.option_coverage.items():
            if opt not in known:
                raise ValidationError(f"option_coverage names undeclared option {opt!r}")
            for f, _ in entries:
                if f not in files:
                    raise ValidationError(f"option_coverage of {opt!r} names unknown file {f!r}")
        for label, per_file in self.base_coverage.items():
            if label not in self.levels:
                raise ValidationError(f"base_coverage for unknown level {label!r}")
            for f in per_file:
                if f not in files:
                    raise ValidationError(f"base_coverage names unknown file {f!r}")
        for atom in atoms(self.predicate):
            if isinstance(atom, Opt) and atom.name not in known:
                raise ValidationError(f"bug_predicate references undeclared option {atom.name!r}")
            if isinstance(atom, LevelAtLeast) and atom.label not in self.levels:
                raise ValidationError(f"bug_predicate references unknown level {atom.label!r}")
        if not self.faulty_files:
            raise ValidationError("faulty_files must be non-empty")
        stray = set(self.faulty_files) - files
        if stray:
            raise ValidationError(f"faulty_files not in file table: {sorted(stray)}")
        if self.pass_outcome == self.fail_outcome:
            raise ValidationError("pass_outcome and fail_outcome must differ")

    def is_buggy(self, level: str, enabled) -> bool:
        return self.predicate.evaluate(set(enabled), self.ordinals[level], self.ordinals)

    def to_document(self) -> dict:
        doc = {
            "name": self.name,
            "levels": list(self.levels),
            "options": {k: list(v) for k, v in self.option_space.items()},
            "files": list(self.file_table),
            "base_coverage": {lvl: {f: sorted(v) for f, v in per.items()}
                              for lvl, per in self.base_coverage.items()},
            "option_coverage": {o: [[f, n] for f, n in v] for o, v in self.option_coverage.items()},
            "bug_predicate": self.bug_predicate,
            "faulty_files": sorted(self.faulty_files),
            "pass_outcome": self.pass_outcome.to_dict(),
            "fail_outcome": self.fail_outcome.to_dict(),
        }
        if self.description:
            doc["description"] = self.description
        return doc


def _load_json(source):
    if isinstance(source, dict):
        return source, None
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        path = Path(source)
        text = path.read_text(encoding="utf-8")
        name = path.stem
    else:
        text, name = source, None
    try:
        return json.loads(text), name
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None


def load_bug_model(source, name: Optional[str] = None) -> BugModel:
    """Load and validate a bug model from a path, JSON text or an already-parsed dict."""
    doc, stem = _load_json(source)
    if not isinstance(doc, dict):
        raise ParseError("bug model must be a JSON object")
    for key in REQUIRED_KEYS:
        if key not in doc:
            raise ParseError("missing required key", field=key)

    def outcome(key):
        try:
            return CompilationOutcome.from_dict(doc[key])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad outcome ({exc})", field=key) from None

    try:
        option_coverage = {o: [(str(f), int(n)) for f, n in v]
                           for o, v in doc["option_coverage"].items()}
        base = {lvl: {f: [int(n) for n in lines] for f, lines in per.items()}
                for lvl, per in doc["base_coverage"].items()}
    except (TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"malformed coverage table ({exc})") from None
    return BugModel(
        levels=[str(x) for x in doc["levels"]],
        option_space={k: [str(x) for x in v] for k, v in doc["options"].items()},
        file_table=[str(f) for f in doc["files"]],
        base_coverage=base,
        option_coverage=option_coverage,
        bug_predicate=doc["bug_predicate"],
        faulty_files=set(doc["faulty_files"]),
        pass_outcome=outcome("pass_outcome"),
        fail_outcome=outcome("fail_outcome"),
        name=name or doc.get("name") or stem or "model",
        description=doc.get("description", ""),
    )


def simulate(model: BugModel, program: Optional[TestProgram], conf: Configuration):
    """Evaluate *conf* against *model*; the program does not influence the result."""
    label = conf.level.label
    if label not in model.ordinals:
        raise LevelUnknown(f"unknown optimization level {label!r}")
    declared = model.option_space.get(label, [])
    disabled = {o.name for o in conf.disabled}
    if not disabled <= set(declared):
        raise InvalidConfiguration(f"{conf.format()} disables options absent at {label}")
    enabled = [n for n in declared if n not in disabled]

    counts = dict.fromkeys(model.universe, 0)
    for f, lines in model.base_coverage.get(label, {}).items():
        for n in lines:
            counts[(f, n)] += 1
    for name in enabled:
        for f, n in model.option_coverage.get(name, ()):
            counts[(f, n)] += 1

    outcome = model.fail_outcome if model.is_buggy(label, enabled) else model.pass_outcome
    return outcome, CoverageSpectrum(counts)


class SimulatedDriver(CompilerDriver):
    kind = "sim"

    def __init__(self, model: BugModel):
        self.model = model
        self._levels = [OptimizationLevel(i, label) for i, label in enumerate(model.levels)]
        self._spaces = {lvl.label: OptionSpace.from_names(lvl, model.option_space.get(lvl.label, []))
                        for lvl in self._levels}

    @classmethod
    def from_file(cls, path) -> "SimulatedDriver":
        return cls(load_bug_model(Path(path)))

    def levels(self):
        return list(self._levels)

    def enabled_options(self, level):
        label = level.label if isinstance(level, OptimizationLevel) else level
        try:
            return self._spaces[label]
        except KeyError:
            raise LevelUnknown(f"unknown optimization level {label!r}") from None

    def compile_and_run(self, program, conf, want_coverage=True):
        outcome, spectrum = simulate(self.model, program, conf)
        return outcome, (spectrum if want_coverage else CoverageSpectrum.empty())

    def source_files(self):
        return set(self.model.file_table)

    def describe(self):
        return {"kind": self.kind, "model": self.model.name}

    def reproduction_levels(self):
        """``(O_fail, O_pass)``: lowest failing level and highest passing level below it."""
        o_fail = None
        for lvl in self._levels:
            if simulate(self.model, None, self._spaces[lvl.label].default())[0] == self.model.fail_outcome:
                o_fail = lvl
                break
        if o_fail is None:
            raise ValidationError(f"model {self.model.name} fails at no level")
        below = [lvl for lvl in self._levels if lvl < o_fail
                 and simulate(self.model, None, self._spaces[lvl.label].default())[0] == self.model.pass_outcome]
        if not below:
            raise ValidationError(f"model {self.model.name} passes at no level below {o_fail}")
        return o_fail, below[-1]
