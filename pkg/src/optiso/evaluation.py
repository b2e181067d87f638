"""Localization metrics, rank statistics and the simulated-corpus ablation harness."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .aggregation import aggregate
from .errors import EmptyCorpus, EmptySample
from .pipeline import CandidateSet, Granularity, caching, check_pair
from .sbfl import FORMULAE, rank_files

TOP_N = (1, 5, 10, 20)


@dataclass(frozen=True)
class GroundTruth:
    bug_id: str
    faulty_files: frozenset

    def __post_init__(self):
        object.__setattr__(self, "faulty_files", frozenset(self.faulty_files))
        if not self.faulty_files:
            raise ValueError(f"{self.bug_id}: ground truth needs at least one faulty file")


@dataclass(frozen=True)
class BugScore:
    first_rank: int
    mean_rank: float
    hits: dict


def score_ranking(ranking, truth: GroundTruth) -> BugScore:
    """First and mean rank of the faulty files; a missing file counts as ``len(ranking) + 1``."""
    ranks = ranking.ranks()
    penalty = len(ranking) + 1
    found = [ranks.get(f, penalty) for f in sorted(truth.faulty_files)]
    first = min(found)
    return BugScore(first, math.fsum(found) / len(found), {n: first <= n for n in TOP_N})


@dataclass
class MetricsReport:
    top_n: dict
    mfr: float
    mar: float
    per_bug: dict = field(default_factory=dict)

    def to_dict(self):
        return {"top_n": {str(n): c for n, c in self.top_n.items()}, "mfr": self.mfr,
                "mar": self.mar,
                "per_bug": {b: {"first_rank": f, "mean_rank": m} for b, (f, m) in self.per_bug.items()}}


def corpus_metrics(results) -> MetricsReport:
    results = list(results)
    if not results:
        raise EmptyCorpus("no bugs to score")
    per_bug, top = {}, dict.fromkeys(TOP_N, 0)
    for ranking, truth in results:
        s = score_ranking(ranking, truth)
        per_bug[truth.bug_id] = (s.first_rank, s.mean_rank)
        for n in TOP_N:
            top[n] += s.hits[n]
    firsts = [f for f, _ in per_bug.values()]
    means = [m for _, m in per_bug.values()]
    return MetricsReport(top, math.fsum(firsts) / len(firsts), math.fsum(means) / len(means), per_bug)


def _twice_midranks(values):
    """2x the mid-ranks of *values* (integers, so sums stay exact)."""
    order = sorted(range(len(values)), key=values.__getitem__)
    out = [0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            out[order[k]] = i + j + 2  # (i+1) + (j+1)
        i = j + 1
    return out


def _check_samples(x, y):
    if not x or not y:
        raise EmptySample("both samples need at least one observation")


def rank_sum(x, y) -> float:
    """Rank sum of *x* in the pooled mid-rank ranking of ``x + y``."""
    _check_samples(x, y)
    return sum(_twice_midranks(list(x) + list(y))[:len(x)]) / 2


def _u_statistic_twice(x, y):
    m = len(x)
    r1_twice = sum(_twice_midranks(list(x) + list(y))[:m])
    return r1_twice - m * (m + 1)


def a12(sample_x, sample_y) -> float:
    """Vargha-Delaney effect size: chance an x observation beats a y one, ties counting half.

    Computed from the rank sum R1 of *sample_x* as ``(R1/m - (m+1)/2) / n``.
    """
    x, y = list(sample_x), list(sample_y)
    _check_samples(x, y)
    m, n = len(x), len(y)
    return _u_statistic_twice(x, y) / (2 * m * n)


@lru_cache(maxsize=None)
def _u_distribution(m, n):
    """Number of orderings of m x's and n y's giving each U = #(x beats y)."""
    if m == 0 or n == 0:
        return (1,)
    with_x_last = _u_distribution(m - 1, n)  # largest element is an x: beats all n y's
    with_y_last = _u_distribution(m, n - 1)
    dist = [0] * (m * n + 1)
    for u, c in enumerate(with_x_last):
        dist[u + n] += c
    for u, c in enumerate(with_y_last):
        dist[u] += c
    return tuple(dist)


def mann_whitney_u(sample_x, sample_y):
    """Two-sided Mann-Whitney U test; returns ``(U_x, p)``.

    Exact null distribution when ``m + n <= 20`` and there are no ties,
    otherwise the normal approximation with tie and continuity corrections.
    """
    x, y = list(sample_x), list(sample_y)
    _check_samples(x, y)
    m, n = len(x), len(y)
    u = _u_statistic_twice(x, y) / 2
    pooled = x + y
    tied = len(set(pooled)) != len(pooled)
    if m + n <= 20 and not tied:
        dist = _u_distribution(m, n)
        total = math.comb(m + n, m)
        k = int(u)
        lower, upper = sum(dist[:k + 1]), sum(dist[k:])
        return u, min(1.0, 2 * min(lower, upper) / total)

    big_n = m + n
    ties = {}
    for v in pooled:
        ties[v] = ties.get(v, 0) + 1
    tie_term = sum(t ** 3 - t for t in ties.values()) / (big_n * (big_n - 1))
    var = m * n / 12 * ((big_n + 1) - tie_term)
    if var <= 0:
        return u, 1.0
    z = max(0.0, abs(u - m * n / 2) - 0.5) / math.sqrt(var)
    return u, min(1.0, math.erfc(z / math.sqrt(2)))


# ---------------------------------------------------------------- ablations

DEFAULT_SETTING = "k=3"
PAIR_COUNTS = (1, 3, 5, 10)
ABLATIONS = ("pairs", "filter", "formula")


def _truth(model):
    return GroundTruth(model.name, frozenset(model.faulty_files))


def rerank(result, candidates, formula):
    rankings = [rank_files(p, result.spectra, candidates, formula) for p in result.pairs]
    return rankings, aggregate(rankings)


def run_bug(model, ablations=ABLATIONS, jobs=1):
    """Every requested variant for one bug model: ``{setting: final ranking}`` plus diagnostics."""
    from .drivers.simulated import SimulatedDriver
    from .localize import localize

    sim = SimulatedDriver(model)
    driver = caching(sim)
    o_fail, o_pass = sim.reproduction_levels()
    base = localize(driver, None, o_fail, o_pass, k=3, jobs=jobs)
    rankings = {DEFAULT_SETTING: base.final}
    results = {3: base}

    if "pairs" in ablations:
        for k in PAIR_COUNTS:
            if k not in results:
                results[k] = localize(driver, None, o_fail, o_pass, k=k, jobs=jobs)
            rankings[f"k={k}"] = results[k].final
        for slot in (1, 2, 3):
            pair_rank = next(r for p, r in zip(base.pairs, base.rankings)
                             if slot in p.slots or p.granularity is Granularity.LEVEL_ONLY)
            rankings[f"adv{slot}"] = pair_rank
    if "filter" in ablations:
        rankings["filter=on"] = base.final
        _, rankings["filter=off"] = rerank(base, CandidateSet.unfiltered(base.candidates.all_files),
                                           "ochiai")
    if "formula" in ablations:
        for key in FORMULAE:
            _, rankings[f"formula={key}"] = rerank(base, base.candidates, key)

    violations = []
    for res in results.values():
        for pair in res.pairs:
            violations += [f"{model.name}: {v}" for v in check_pair(pair, driver, None, res.triage)]
    return {
        "bug": model.name,
        "rankings": rankings,
        "candidates": base.candidates.summary(),
        "triage": {"bug_triggering": len(base.triage.bug_triggering),
                   "bug_free": len(base.triage.bug_free)},
        "pairs": {k: len(r.pairs) for k, r in sorted(results.items())},
        "granularity": base.pairs[0].granularity.value,
        "faulty_suspicious": sorted(set(model.faulty_files) & base.candidates.suspicious_files),
        "violations": violations,
    }


def run_ablations(corpus, ablations=ABLATIONS, jobs=1, keep_going=False):
    """Metrics for every setting over a corpus of bug models, plus statistics against k=3."""
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpus("the corpus contains no bug models")
    bugs, errors = [], {}
    for model in corpus:
        try:
            bugs.append(run_bug(model, ablations, jobs))
        except Exception as exc:
            if not keep_going:
                raise
            errors[model.name] = f"{type(exc).__name__}: {exc}"
    if not bugs:
        raise EmptyCorpus("every bug model in the corpus failed")

    truths = {m.name: _truth(m) for m in corpus}
    settings = list(bugs[0]["rankings"])
    metrics = {s: corpus_metrics((b["rankings"][s], truths[b["bug"]]) for b in bugs) for s in settings}

    base_first = [metrics[DEFAULT_SETTING].per_bug[b["bug"]][0] for b in bugs]
    comparisons = {}
    for s in settings:
        if s == DEFAULT_SETTING:
            continue
        firsts = [metrics[s].per_bug[b["bug"]][0] for b in bugs]
        u, p = mann_whitney_u(base_first, firsts)
        # first ranks: smaller is better, so a variant rank above the default's is a default win
        comparisons[s] = {"a12_default_better": a12(firsts, base_first), "U": u, "p_value": p}

    top1 = {s: {b for b, (f, _) in metrics[s].per_bug.items() if f == 1} for s in settings}
    singles = [s for s in ("adv1", "adv2", "adv3") if s in top1]
    only_aggregated = sorted(top1[DEFAULT_SETTING] - set().union(*(top1[s] for s in singles))) \
        if singles else []

    def mean(key):
        return math.fsum(b["candidates"][key] for b in bugs) / len(bugs)

    return {
        "sample_construction": "per-bug first ranks of the faulty files",
        "rank_penalty": "faulty files missing from a ranking get rank len(ranking)+1",
        "settings": {s: metrics[s].to_dict() for s in settings},
        "comparisons": comparisons,
        "top1_only_aggregated": only_aggregated,
        "candidates": {"all": mean("all"), "covered": mean("covered"), "suspicious": mean("suspicious")},
        "bugs": [{k: v for k, v in b.items() if k != "rankings"} for b in bugs],
        "pair_violations": [v for b in bugs for v in b["violations"]],
        "errors": errors,
    }


def format_report(report) -> str:
    header = f"{'setting':<18}{'Top-1':>7}{'Top-5':>7}{'Top-10':>8}{'Top-20':>8}{'MFR':>8}{'MAR':>8}" \
             f"{'A12':>7}{'p':>8}"
    lines = [header, "-" * len(header)]
    for name, m in report["settings"].items():
        t = m["top_n"]
        cmp_ = report["comparisons"].get(name)
        stats = f"{cmp_['a12_default_better']:>7.3f}{cmp_['p_value']:>8.3f}" if cmp_ else f"{'-':>7}{'-':>8}"
        lines.append(f"{name:<18}{t['1']:>7}{t['5']:>7}{t['10']:>8}{t['20']:>8}"
                     f"{m['mfr']:>8.2f}{m['mar']:>8.2f}{stats}")
    c = report["candidates"]
    lines.append("")
    lines.append(f"mean candidate files: all {c['all']:.1f} -> covered {c['covered']:.1f} "
                 f"-> differential {c['suspicious']:.1f}")
    if report["top1_only_aggregated"]:
        lines.append("Top-1 only after aggregation: " + ", ".join(report["top1_only_aggregated"]))
    lines.append(f"pair invariant violations: {len(report['pair_violations'])}")
    for bug, err in report["errors"].items():
        lines.append(f"error in {bug}: {err}")
    return "\n".join(lines)
