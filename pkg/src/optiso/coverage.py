"""Coverage spectra and the two on-disk coverage formats."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import ParseError

CANONICAL = "canonical"
GCOV_INTERMEDIATE = "gcov_intermediate"


@dataclass(frozen=True, order=True)
class RawCoverageRecord:
    file: str
    line: int
    count: int

    def __post_init__(self):
        if self.line < 1:
            raise ValueError(f"line numbers are 1-based, got {self.line}")
        if self.count < 0:
            raise ValueError(f"negative execution count {self.count}")


class CoverageSpectrum(Mapping):
    """Execution counts keyed by ``(file, line)``.

    Zero-count entries are kept: they mark instrumented lines that did not run.
    A statement is *executed* only when its count is positive.
    """

    __slots__ = ("_counts", "_executed")

    def __init__(self, counts=None):
        merged = {}
        for key, n in (counts or {}).items():
            file, line = key
            merged[(str(file), int(line))] = merged.get((str(file), int(line)), 0) + int(n)
        self._counts = merged
        self._executed = frozenset(k for k, n in merged.items() if n > 0)

    @classmethod
    def from_records(cls, records: Iterable[RawCoverageRecord]) -> "CoverageSpectrum":
        counts = {}
        for r in records:
            counts[(r.file, r.line)] = counts.get((r.file, r.line), 0) + r.count
        return cls(counts)

    @classmethod
    def empty(cls) -> "CoverageSpectrum":
        return cls()

    def __getitem__(self, key):
        return self._counts[key]

    def __iter__(self) -> Iterator:
        return iter(self._counts)

    def __len__(self):
        return len(self._counts)

    def __eq__(self, other):
        if isinstance(other, CoverageSpectrum):
            return self._counts == other._counts
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._counts.items()))

    def __repr__(self):
        return f"CoverageSpectrum({len(self._counts)} lines, {len(self._executed)} executed)"

    @property
    def executed(self) -> frozenset:
        return self._executed

    def is_executed(self, file, line) -> bool:
        return (file, line) in self._executed

    def files(self) -> set[str]:
        return {f for f, _ in self._counts}

    def executed_files(self) -> set[str]:
        return {f for f, _ in self._executed}

    def executed_in(self, file) -> list[int]:
        return sorted(line for f, line in self._executed if f == file)

    def records(self) -> list[RawCoverageRecord]:
        return [RawCoverageRecord(f, line, n) for (f, line), n in sorted(self._counts.items())]


def merge_records(records: Iterable[RawCoverageRecord]) -> list[RawCoverageRecord]:
    return CoverageSpectrum.from_records(records).records()


def format_canonical(records) -> str:
    """``file<TAB>line<TAB>count`` per line, sorted by (file, line)."""
    if isinstance(records, CoverageSpectrum):
        records = records.records()
    else:
        records = merge_records(records)
    return "".join(f"{r.file}\t{r.line}\t{r.count}\n" for r in records)


def _parse_canonical(text):
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        parts = raw.split("\t")
        if len(parts) != 3 or not parts[0]:
            raise ParseError(f"expected file<TAB>line<TAB>count, got {raw!r}", line=lineno)
        try:
            out.append(RawCoverageRecord(parts[0], int(parts[1]), int(parts[2])))
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
    return out


def _parse_gcov_intermediate(text):
    out = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        kind, sep, value = raw.partition(":")
        if not sep:
            if raw.strip():
                raise ParseError(f"malformed record {raw!r}", line=lineno)
            continue
        if kind == "file":
            if not value:
                raise ParseError("empty file name", line=lineno)
            current = value
        elif kind == "lcount":
            if current is None:
                raise ParseError("lcount record before any file record", line=lineno)
            fields = value.split(",")
            try:
                line, count = int(fields[0]), int(fields[1])
                out.append(RawCoverageRecord(current, line, count))
            except (IndexError, ValueError) as exc:
                raise ParseError(f"bad lcount record {raw!r} ({exc})", line=lineno) from None
        # function:, branch:, version: and the rest carry nothing we use
    return out


def parse_coverage(text: str, format: str = CANONICAL) -> list[RawCoverageRecord]:
    if format == CANONICAL:
        records = _parse_canonical(text)
    elif format == GCOV_INTERMEDIATE:
        records = _parse_gcov_intermediate(text)
    else:
        raise ValueError(f"unknown coverage format {format!r}")
    return merge_records(records)


def parse_spectrum(text: str, format: str = CANONICAL) -> CoverageSpectrum:
    return CoverageSpectrum.from_records(parse_coverage(text, format))
