"""Statement suspiciousness, file-level scores and per-pair file rankings."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyFile, InvalidCounts, MissingSpectrum

# canonical key -> display name, in the order reports list them
FORMULAE = {
    "ochiai": "Ochiai",
    "tarantula": "Tarantula",
    "dstar2": "DStar",
    "dice": "Dice",
    "barinel": "Barinel",
    "op2": "Op2",
}
DSTAR_EXPONENT = 2


def formula_key(name: str) -> str:
    key = name.lower().replace("-", "").replace("_", "")
    if key == "dstar":
        key = "dstar2"
    if key not in FORMULAE:
        raise ValueError(f"unknown formula {name!r}; choose from {', '.join(FORMULAE)}")
    return key


@dataclass(frozen=True)
class SpectrumCounts:
    ef: int
    nf: int
    ep: int
    np: int

    def __post_init__(self):
        if min(self.ef, self.nf, self.ep, self.np) < 0:
            raise InvalidCounts(f"negative spectrum count in {self}")

    @property
    def totalf(self):
        return self.ef + self.nf

    @property
    def totalp(self):
        return self.ep + self.np


def _ochiai(c):
    denom = math.sqrt((c.ef + c.nf) * (c.ef + c.ep))
    return c.ef / denom if denom else 0.0


def _tarantula(c):
    if c.totalf == 0 or c.totalp == 0:
        return 0.0
    fail_ratio = c.ef / c.totalf
    denom = fail_ratio + c.ep / c.totalp
    return fail_ratio / denom if denom else 0.0


def _dstar(c):
    denom = c.ep + c.nf
    if denom == 0:
        return math.inf if c.ef else 0.0
    return c.ef ** DSTAR_EXPONENT / denom


def _dice(c):
    denom = c.ef + c.nf + c.ep
    return 2 * c.ef / denom if denom else 0.0


def _barinel(c):
    denom = c.ep + c.ef
    return 1.0 - c.ep / denom if denom else 0.0


def _op2(c):
    return c.ef - c.ep / (c.totalp + 1)


_IMPL = {"ochiai": _ochiai, "tarantula": _tarantula, "dstar2": _dstar,
         "dice": _dice, "barinel": _barinel, "op2": _op2}


def statement_suspiciousness(counts: SpectrumCounts, formula: str = "ochiai") -> float:
    """Suspiciousness of one statement.

    Zero denominators give 0.0, except DStar with ``ep + nf == 0`` and a
    covering failure, which gives ``math.inf``; :func:`rank_files` maps that
    sentinel above every finite score of the ranking.
    """
    return float(_IMPL[formula_key(formula)](counts))


def pair_spectrum_counts(pair, spectra, statement) -> SpectrumCounts:
    try:
        fail = spectra[pair.fail_conf]
    except KeyError:
        raise MissingSpectrum(f"no spectrum for {pair.fail_conf.format()}") from None
    ef = 1 if statement in fail.executed else 0
    ep = 0
    for conf in pair.pass_confs:
        try:
            ep += statement in spectra[conf].executed
        except KeyError:
            raise MissingSpectrum(f"no spectrum for {conf.format()}") from None
    return SpectrumCounts(ef, 1 - ef, ep, len(pair.pass_confs) - ep)


def file_suspiciousness(file, scored_statements) -> float:
    scores = list(scored_statements)
    if not scores:
        raise EmptyFile(f"{file} has no statement covered by the failing configuration")
    return math.fsum(scores) / len(scores)


@dataclass(frozen=True)
class RankEntry:
    file: str
    score: float
    rank: int


@dataclass(frozen=True)
class FileRanking:
    pair_id: str
    entries: tuple

    @classmethod
    def from_scores(cls, pair_id, scores: dict) -> "FileRanking":
        """Competition ranking ("1224"): ties share ``1 + #strictly better``."""
        ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
        entries, better = [], 0
        for i, (f, s) in enumerate(ordered):
            if i and s != ordered[i - 1][1]:
                better = i
            entries.append(RankEntry(f, s, better + 1))
        return cls(pair_id, tuple(entries))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def files(self):
        return [e.file for e in self.entries]

    def ranks(self) -> dict:
        return {e.file: e.rank for e in self.entries}

    def rank_of(self, file):
        for e in self.entries:
            if e.file == file:
                return e.rank
        return None

    def to_tsv(self) -> str:
        return "".join(f"{e.rank}\t{e.file}\t{e.score:.6f}\n" for e in self.entries)


def rank_files(pair, spectra, candidates, formula="ochiai") -> FileRanking:
    """Rank the candidate files the pair's failing configuration executes."""
    key = formula_key(formula)
    try:
        fail = spectra[pair.fail_conf]
    except KeyError:
        raise MissingSpectrum(f"no spectrum for {pair.fail_conf.format()}") from None
    per_file = {}
    for stmt in fail.executed:
        if stmt[0] in candidates.suspicious_files:
            c = pair_spectrum_counts(pair, spectra, stmt)
            per_file.setdefault(stmt[0], []).append(statement_suspiciousness(c, key))

    finite = [s for scores in per_file.values() for s in scores if not math.isinf(s)]
    top = max(finite, default=0.0) + 1.0
    scores = {f: file_suspiciousness(f, [top if math.isinf(s) else s for s in sorted(v)])
              for f, v in per_file.items()}
    return FileRanking.from_scores(pair.pair_id, scores)
