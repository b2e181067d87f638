"""
Why voting beats any single ranking
===================================

A file that tops two rankings but falls to rank 67 in the third loses to a
file that stays in the top five everywhere.
"""

from optiso.aggregation import aggregate, format_aggregate_tsv, vote_weight
from optiso.sbfl import FileRanking, RankEntry

print([vote_weight(r) for r in (1, 3, 5, 6, 10, 11, 20, 21, 50)])


def ranking(name, ranks):
    entries = sorted((RankEntry(f, 0.0, r) for f, r in ranks.items()), key=lambda e: e.rank)
    return FileRanking(name, tuple(entries))


rankings = [
    ranking("adv1", {"tree-ssa-sccvn.c": 1, "tree-vrp.c": 4}),
    ranking("adv2", {"tree-ssa-sccvn.c": 1, "tree-vrp.c": 3}),
    ranking("adv3", {"tree-ssa-sccvn.c": 67, "tree-vrp.c": 4}),
]
print(format_aggregate_tsv(aggregate(rankings), rankings))
