"""Candidate filtering, option triage and adversarial configuration pairs."""

from __future__ import annotations

import enum
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .config import CompilationOutcome, CompilerDriver, Configuration
from .coverage import CoverageSpectrum
from .errors import (
    AllPassConfsInvalid,
    EmptySpectrum,
    FailConfNotFailing,
    NonReproducing,
    NoPassingLevel,
)

log = logging.getLogger(__name__)

# Disable-fractions of the bug-free options, one per pair slot.
PAIR_SCHEDULES = {
    1: (Fraction(1, 2),),
    3: (Fraction(1), Fraction(1, 2), Fraction(0)),
    5: (Fraction(1), Fraction(3, 4), Fraction(1, 2), Fraction(1, 4), Fraction(0)),
    # all, none, and eight evenly spaced steps from 7/8 down to 1/8
    10: (Fraction(1),) + tuple(Fraction(49 - 6 * i, 56) for i in range(8)) + (Fraction(0),),
}


class CachingDriver(CompilerDriver):
    """Memoizes ``compile_and_run`` per configuration; safe to share between threads."""

    def __init__(self, driver: CompilerDriver):
        self.inner = driver
        self.kind = driver.kind
        self._memo = {}
        self._lock = threading.Lock()
        self.executions = 0

    def levels(self):
        return self.inner.levels()

    def enabled_options(self, level):
        return self.inner.enabled_options(level)

    def source_files(self):
        return self.inner.source_files()

    def compile_and_run(self, program, conf, want_coverage=True):
        with self._lock:
            hit = self._memo.get(conf)
        if hit is not None and (hit[2] or not want_coverage):
            return hit[0], hit[1]
        outcome, spectrum = self.inner.compile_and_run(program, conf, want_coverage)
        with self._lock:
            self.executions += 1
            prev = self._memo.get(conf)
            if prev is None or not prev[2]:
                self._memo[conf] = (outcome, spectrum, want_coverage)
        return outcome, spectrum

    def describe(self):
        return self.inner.describe()


def caching(driver) -> CachingDriver:
    return driver if isinstance(driver, CachingDriver) else CachingDriver(driver)


def run_all(driver, program, confs, jobs=1, want_coverage=False):
    """Execute configurations, up to *jobs* at a time; results keep input order."""
    confs = list(confs)
    if jobs <= 1 or len(confs) <= 1:
        return [driver.compile_and_run(program, c, want_coverage) for c in confs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda c: driver.compile_and_run(program, c, want_coverage), confs))


@dataclass(frozen=True)
class CandidateSet:
    all_files: frozenset
    covered_files: frozenset
    suspicious_files: frozenset
    filtered: bool = True

    @classmethod
    def unfiltered(cls, all_files) -> "CandidateSet":
        files = frozenset(all_files)
        return cls(files, files, files, filtered=False)

    def summary(self):
        return {"all": len(self.all_files), "covered": len(self.covered_files),
                "suspicious": len(self.suspicious_files)}


def filter_candidates(fail_spectrum: CoverageSpectrum, pass_spectrum: CoverageSpectrum,
                      all_files=None, symmetric=False) -> CandidateSet:
    """Keep files executed under the failing level, then those with differential coverage.

    Only executed/not-executed matters; count magnitudes are ignored. With
    *symmetric* the differential filter also keeps statements executed only
    by the passing level.
    """
    if not fail_spectrum.executed:
        raise EmptySpectrum("the failing configuration executed no instrumented statement")
    if all_files is None:
        all_files = fail_spectrum.files() | pass_spectrum.files()
    all_files = frozenset(all_files)
    covered = frozenset(fail_spectrum.executed_files()) & all_files
    diff = fail_spectrum.executed - pass_spectrum.executed
    if symmetric:
        diff |= pass_spectrum.executed - fail_spectrum.executed
    suspicious = frozenset(f for f, _ in diff) & covered
    return CandidateSet(all_files, covered, suspicious)


@dataclass(frozen=True)
class OptionTriage:
    level: object
    bug_triggering: tuple
    bug_free: tuple
    fail_result: CompilationOutcome
    pass_result: CompilationOutcome
    probes: dict = field(default_factory=dict, compare=False)

    def to_dict(self):
        classes = {o.name: "bug-triggering" for o in self.bug_triggering}
        classes.update({o.name: "bug-free" for o in self.bug_free})
        ordered = sorted(self.bug_triggering + self.bug_free, key=lambda o: o.index)
        return {
            "level": self.level.label,
            "fail_result": self.fail_result.to_dict(),
            "pass_result": self.pass_result.to_dict(),
            "options": [{"name": o.name, "index": o.index, "class": classes[o.name]} for o in ordered],
            "bug_triggering": [o.name for o in self.bug_triggering],
            "bug_free": [o.name for o in self.bug_free],
        }


def triage_options(driver: CompilerDriver, program, o_fail, pass_result: CompilationOutcome,
                   jobs=1) -> OptionTriage:
    """Probe each enabled option alone: disabling it either conceals the bug or not."""
    space = driver.enabled_options(driver.level(o_fail))
    fail_result, _ = driver.compile_and_run(program, space.default(), False)
    if fail_result == pass_result:
        raise NonReproducing(f"{space.default().format()} does not reproduce the bug "
                             f"(got {fail_result}, same as the passing result)")
    probes = run_all(driver, program, [space.configure([o]) for o in space], jobs)
    outcomes = {o.name: out for o, (out, _) in zip(space, probes)}
    bt = tuple(o for o in space if outcomes[o.name] == pass_result)
    bf = tuple(o for o in space if outcomes[o.name] != pass_result)
    return OptionTriage(space.level, bt, bf, fail_result, pass_result, outcomes)


class Granularity(str, enum.Enum):
    FINE_GRAINED = "FineGrained"
    LEVEL_ONLY = "LevelOnly"


@dataclass(frozen=True)
class AdversarialPair:
    fail_conf: Configuration
    pass_confs: tuple
    granularity: Granularity = Granularity.FINE_GRAINED
    pair_id: str = "adv1"
    fraction: Optional[Fraction] = None
    dropped: tuple = ()
    verified: bool = True
    slots: tuple = ()

    def configurations(self):
        return (self.fail_conf,) + tuple(self.pass_confs)

    def to_dict(self):
        return {
            "pair_id": self.pair_id,
            "granularity": self.granularity.value,
            "fraction": None if self.fraction is None else str(self.fraction),
            "fail_conf": self.fail_conf.format(),
            "pass_confs": [c.format() for c in self.pass_confs],
            "dropped_pass_confs": [c.format() for c in self.dropped],
            "verified": self.verified,
            "slots": list(self.slots),
        }


def gen_adv_confs(driver, program, o_fail, f_disable, f_bt, fail_result, pass_result,
                  jobs=1, pair_id="adv1", fraction=None) -> AdversarialPair:
    """One failing configuration plus one passing configuration per bug-triggering option."""
    space = driver.enabled_options(driver.level(o_fail))
    fail_conf = space.configure(f_disable)
    candidates = [fail_conf.disable(b) for b in sorted(f_bt, key=lambda o: o.index)]
    results = run_all(driver, program, [fail_conf] + candidates, jobs)
    if results[0][0] != fail_result:
        raise FailConfNotFailing(f"{fail_conf.format()} gave {results[0][0]}, expected {fail_result}")
    kept, dropped = [], []
    for conf, (outcome, _) in zip(candidates, results[1:]):
        (kept if outcome == pass_result else dropped).append(conf)
    for conf in dropped:
        log.info("dropping %s from %s: outcome differs from the passing result", conf.format(), pair_id)
    if not kept:
        raise AllPassConfsInvalid(f"no passing configuration survived for {fail_conf.format()}")
    return AdversarialPair(fail_conf, tuple(kept), Granularity.FINE_GRAINED, pair_id, fraction,
                           tuple(dropped))


def disable_count(fraction: Fraction, n: int) -> int:
    return -((-fraction.numerator * n) // fraction.denominator)


def level_only_pair(driver, program, o_fail, pass_result, jobs=1) -> AdversarialPair:
    o_fail = driver.level(o_fail)
    fail_conf = driver.enabled_options(o_fail).default()
    lower = [driver.enabled_options(lvl).default() for lvl in driver.levels() if lvl < o_fail]
    results = run_all(driver, program, lower, jobs)
    passing = tuple(c for c, (out, _) in zip(lower, results) if out == pass_result)
    if not passing:
        raise NoPassingLevel(f"no level below {o_fail} conceals the bug")
    return AdversarialPair(fail_conf, passing, Granularity.LEVEL_ONLY, "adv1")


def build_pair_suite(driver, program, o_fail, o_pass, triage: OptionTriage, k=3, jobs=1):
    """The k adversarial pairs, or the level-granularity fallback when nothing triggers alone."""
    if k not in PAIR_SCHEDULES:
        raise ValueError(f"pair count must be one of {sorted(PAIR_SCHEDULES)}, got {k}")
    schedule = PAIR_SCHEDULES[k]
    if not triage.bug_triggering:
        pair = level_only_pair(driver, program, o_fail, triage.pass_result, jobs)
        return [replace(pair, slots=tuple(range(1, len(schedule) + 1)))]

    pairs, seen = [], {}
    bug_free = sorted(triage.bug_free, key=lambda o: o.index)
    for slot, q in enumerate(schedule, 1):
        f_disable = bug_free[:disable_count(q, len(bug_free))]
        args = (driver, program, o_fail)
        tail = dict(fail_result=triage.fail_result, pass_result=triage.pass_result, jobs=jobs,
                    pair_id=f"adv{slot}")
        try:
            pair = gen_adv_confs(*args, f_disable, triage.bug_triggering, fraction=q, **tail)
        except (FailConfNotFailing, AllPassConfsInvalid) as exc:
            log.info("slot %d (fraction %s): %s; retrying with nothing disabled", slot, q, exc)
            pair = gen_adv_confs(*args, (), triage.bug_triggering, fraction=Fraction(0), **tail)
        if pair.fail_conf in seen:
            i = seen[pair.fail_conf]
            pairs[i] = replace(pairs[i], slots=pairs[i].slots + (slot,))
            continue
        seen[pair.fail_conf] = len(pairs)
        pairs.append(replace(pair, slots=(slot,)))
    return pairs


def check_pair(pair: AdversarialPair, driver, program, triage: OptionTriage) -> list[str]:
    """Structural and behavioural violations of a pair; empty when it is sound."""
    problems = []
    bt = set(triage.bug_triggering)
    if pair.granularity is Granularity.FINE_GRAINED:
        if pair.fail_conf.level != triage.level:
            problems.append(f"{pair.pair_id}: fail conf not at {triage.level}")
        for conf in pair.pass_confs:
            delta = conf.disabled - pair.fail_conf.disabled
            if conf.level != pair.fail_conf.level or not pair.fail_conf.disabled <= conf.disabled \
                    or len(delta) != 1 or not delta <= bt:
                problems.append(f"{pair.pair_id}: {conf.format()} is not a one-option delta")
    else:
        if pair.fail_conf.disabled or any(c.disabled or not c.level < pair.fail_conf.level
                                          for c in pair.pass_confs):
            problems.append(f"{pair.pair_id}: malformed level-granularity pair")
    if driver.compile_and_run(program, pair.fail_conf, False)[0] != triage.fail_result:
        problems.append(f"{pair.pair_id}: fail conf does not fail")
    for conf in pair.pass_confs:
        if driver.compile_and_run(program, conf, False)[0] != triage.pass_result:
            problems.append(f"{pair.pair_id}: {conf.format()} does not pass")
    return problems
