import pytest
from hypothesis import given, strategies as st

from optiso.config import (
    CompilationOutcome,
    Configuration,
    FineGrainedOption,
    OptimizationLevel,
    OptionSpace,
    OutcomeStatus,
    driver_levels,
    enabled_options,
    output_digest,
    parse_configuration,
)
from optiso.errors import InvalidConfiguration, LevelUnknown, ParseError

from conftest import make_driver

O1 = OptimizationLevel(1, "O1")
NAMES = ["tree-pre", "expensive-optimizations", "gcse", "ipa-cp", "peephole2"]


def space(names=NAMES, level=O1):
    return OptionSpace.from_names(level, names)


def test_level_ordering_and_flag():
    levels = [OptimizationLevel(i, lab) for i, lab in enumerate(["O0", "O1", "Os", "O2"])]
    assert sorted(reversed(levels)) == levels
    assert levels[2].flag == "-Os"


def test_option_indices_follow_declaration_order():
    sp = space()
    assert [o.index for o in sp] == list(range(len(NAMES)))
    assert sp.option("gcse") == FineGrainedOption("gcse", 2)
    assert sp.option("gcse").negated_flag == "-fno-gcse"


def test_option_space_rejects_duplicates():
    with pytest.raises(ValueError):
        OptionSpace(O1, (FineGrainedOption("a", 0), FineGrainedOption("a", 1)))
    with pytest.raises(ValueError):
        OptionSpace(O1, (FineGrainedOption("a", 0), FineGrainedOption("b", 2)))


def test_configuration_equality_ignores_order():
    sp = space()
    assert sp.configure(["gcse", "tree-pre"]) == sp.configure(["tree-pre", "gcse"])
    assert hash(sp.configure(["gcse", "tree-pre"])) == hash(sp.configure(["tree-pre", "gcse"]))
    assert sp.configure(["gcse"]) != sp.default()


def test_configuration_rejects_foreign_option():
    sp = space()
    with pytest.raises(InvalidConfiguration):
        Configuration(sp, [FineGrainedOption("not-here", 0)])
    with pytest.raises(KeyError):
        sp.configure(["not-here"])


def test_configuration_is_immutable():
    conf = space().default()
    with pytest.raises(AttributeError):
        conf.disabled = frozenset()


def test_format_uses_index_order():
    conf = space().configure(["peephole2", "tree-pre"])
    assert conf.format() == "-O1 -fno-tree-pre -fno-peephole2"
    assert [o.name for o in conf.enabled()] == ["expensive-optimizations", "gcse", "ipa-cp"]


@given(st.sets(st.sampled_from(NAMES)))
def test_configuration_round_trip(disabled):
    sp = space()
    conf = sp.configure(disabled)
    assert parse_configuration(conf.format(), {"O1": sp}) == conf


def test_parse_configuration_errors():
    sp = {"O1": space()}
    with pytest.raises(ParseError):
        parse_configuration("", sp)
    with pytest.raises(ParseError):
        parse_configuration("-O1 -fgcse", sp)
    with pytest.raises(InvalidConfiguration):
        parse_configuration("-O1 -fno-bogus", sp)
    with pytest.raises(LevelUnknown):
        parse_configuration("-O9", sp)


def test_outcome_equality_is_fieldwise():
    a = CompilationOutcome.ok(b"42\n")
    assert a == CompilationOutcome(OutcomeStatus.RUN_OK, 0, output_digest(b"42\n"))
    assert a != CompilationOutcome.ok(b"43\n")
    assert CompilationOutcome("RunAbort", 134) != CompilationOutcome("RunAbort", 139)
    with pytest.raises(ValueError):
        CompilationOutcome("CompilerCrash", 1, "abc")


def test_outcome_dict_round_trip():
    for out in (CompilationOutcome.ok(b""), CompilationOutcome("RunAbort", 134)):
        assert CompilationOutcome.from_dict(out.to_dict()) == out
    assert CompilationOutcome.from_dict({"status": "RunOk", "stdout": "hi"}) == CompilationOutcome.ok(b"hi")


def test_simulated_levels_echo_declaration():
    drv = make_driver("opt(x)", levels=["O0", "O1", "O2"],
                      options={"O0": [], "O1": ["x"], "O2": ["x", "y"]})
    assert [lvl.label for lvl in driver_levels(drv)] == ["O0", "O1", "O2"]
    assert driver_levels(drv) == driver_levels(drv)


def test_enabled_options_deterministic():
    drv = make_driver("opt(x)", options={"O0": [], "O1": ["a", "b", "c", "x"]})
    first = enabled_options(drv, drv.level("O1"))
    assert [o.name for o in first] == ["a", "b", "c", "x"]
    assert first.serialize() == enabled_options(drv, drv.level("O1")).serialize()
    with pytest.raises(LevelUnknown):
        drv.level("O7")
