"""Weighted rank voting across the per-pair file rankings."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyInput, InvalidRank
from .sbfl import FileRanking, RankEntry


def vote_weight(rank: int) -> float:
    """5 for rank 1, 4 up to rank 5, 3 up to 10, 2 up to 20, then ``1/rank``."""
    if rank < 1:
        raise InvalidRank(f"ranks start at 1, got {rank}")
    if rank == 1:
        return 5.0
    if rank <= 5:
        return 4.0
    if rank <= 10:
        return 3.0
    if rank <= 20:
        return 2.0
    return 1.0 / rank


@dataclass(frozen=True)
class VoteTable:
    per_file: dict  # file -> tuple of (pair_id, rank or None, vote)
    totals: dict

    def best_rank(self, file):
        ranks = [r for _, r, _ in self.per_file[file] if r is not None]
        return min(ranks) if ranks else math.inf


def vote_table(rankings, weight=vote_weight) -> VoteTable:
    rankings = list(rankings)
    if not rankings:
        raise EmptyInput("nothing to aggregate")
    files = sorted({e.file for r in rankings for e in r.entries})
    lookup = [r.ranks() for r in rankings]
    per_file, totals = {}, {}
    for f in files:
        row = []
        for ranking, ranks in zip(rankings, lookup):
            rank = ranks.get(f)
            row.append((ranking.pair_id, rank, 0.0 if rank is None else weight(rank)))
        per_file[f] = tuple(row)
        totals[f] = math.fsum(v for _, _, v in row)
    return VoteTable(per_file, totals)


def aggregate(rankings, weight=vote_weight, pair_id="aggregate") -> FileRanking:
    """Sum the votes each file earns in every ranking and rank files by the total.

    Files missing from a ranking earn nothing from it. Equal totals are
    ordered by best individual rank, then by name, and share a rank.
    """
    table = vote_table(rankings, weight)
    order = sorted(table.totals, key=lambda f: (-table.totals[f], table.best_rank(f), f))
    entries, better = [], 0
    for i, f in enumerate(order):
        if i and table.totals[f] != table.totals[order[i - 1]]:
            better = i
        entries.append(RankEntry(f, table.totals[f], better + 1))
    return FileRanking(pair_id, tuple(entries))


def format_aggregate_tsv(final: FileRanking, rankings) -> str:
    """``rank<TAB>file<TAB>total_vote<TAB>per-pair ranks`` ('-' where absent)."""
    lookup = [r.ranks() for r in rankings]
    lines = []
    for e in final.entries:
        per_pair = ",".join(str(ranks[e.file]) if e.file in ranks else "-" for ranks in lookup)
        lines.append(f"{e.rank}\t{e.file}\t{e.score:.6f}\t{per_pair}\n")
    return "".join(lines)
