"""Acceptance criteria, one test each.

Every test records a ``PASS``/``FAIL`` line (criterion number, measured
values, runtime against its budget); conftest prints them in the terminal
summary so they appear in a plain ``pytest`` run.
"""

import math
import random
import time

import pytest

from optiso.aggregation import aggregate, vote_table, vote_weight
from optiso.cli import main as cli_main
from optiso.config import CompilationOutcome
from optiso.corpus import bundled_models, corpus_dir
from optiso.evaluation import a12, mann_whitney_u, run_ablations
from optiso.pipeline import triage_options
from optiso.sbfl import FORMULAE, FileRanking, RankEntry, SpectrumCounts, statement_suspiciousness

from conftest import PASS, make_driver
from oracles import enumerate_u_pvalue, pairwise_a12, random_predicate, truth_table

RESULTS = []


def record(number, title, ok, detail, elapsed, budget):
    within = elapsed <= budget
    status = "PASS" if ok and within else "FAIL"
    RESULTS.append(f"[{status}] criterion {number:>2} {title}: {detail} ({elapsed:.2f}s, budget {budget:g}s)")
    print(RESULTS[-1])
    assert ok, detail
    assert within, f"took {elapsed:.2f}s, budget {budget}s"


@pytest.fixture(scope="module")
def corpus_report():
    start = time.perf_counter()
    report = run_ablations(bundled_models(), ("pairs", "filter", "formula"))
    return report, time.perf_counter() - start


def _ranking(pair_id, ranks):
    entries = sorted((RankEntry(f, 0.0, r) for f, r in ranks.items()), key=lambda e: (e.rank, e.file))
    return FileRanking(pair_id, tuple(entries))


def test_c01_voting_outlier():
    t = time.perf_counter()
    rs = [_ranking("adv1", {"A": 1, "B": 4}), _ranking("adv2", {"A": 1, "B": 3}),
          _ranking("adv3", {"A": 67, "B": 4})]
    totals = vote_table(rs).totals
    order = aggregate(rs).files()
    ok = abs(totals["A"] - (10 + 1 / 67)) <= 1e-9 and totals["B"] == 12 and order.index("B") < order.index("A")
    record(1, "voting with an outlier rank", ok,
           f"(1,1,67) -> {totals['A']:.10f}, (4,3,4) -> {totals['B']:g}, order {order}",
           time.perf_counter() - t, 1)


def test_c02_vote_weight_table():
    t = time.perf_counter()
    want = {1: 5, 5: 4, 6: 3, 10: 3, 11: 2, 20: 2, 21: 1 / 21, 50: 0.02}
    got = {r: vote_weight(r) for r in want}
    record(2, "vote-weight table", got == want, f"{got}", time.perf_counter() - t, 1)


def test_c03_ochiai_identity():
    t = time.perf_counter()
    worst = max(abs(statement_suspiciousness(SpectrumCounts(1, 0, ep, 0)) - 1 / math.sqrt(1 + ep))
                for ep in range(1001))
    record(3, "Ochiai simplified identity", worst <= 1e-12, f"max |diff| over ep=0..1000 = {worst:.2e}",
           time.perf_counter() - t, 1)


HAND = {  # (ef, nf, ep, np) -> value, computed by hand
    "ochiai": [((1, 0, 3, 1), 0.5), ((1, 0, 0, 3), 1.0), ((2, 1, 2, 0), 2 / math.sqrt(12)),
               ((0, 1, 2, 2), 0.0), ((0, 0, 0, 0), 0.0)],
    "tarantula": [((1, 0, 2, 2), 2 / 3), ((1, 0, 0, 4), 1.0), ((1, 0, 4, 0), 0.5),
                  ((0, 1, 0, 3), 0.0), ((1, 0, 0, 0), 0.0)],
    "dstar2": [((1, 0, 1, 3), 1.0), ((1, 0, 4, 0), 0.25), ((2, 1, 1, 0), 2.0), ((1, 0, 0, 3), math.inf),
               ((0, 0, 0, 0), 0.0)],
    "dice": [((1, 0, 1, 1), 1.0), ((1, 0, 3, 0), 0.5), ((2, 1, 1, 0), 1.0), ((0, 1, 0, 0), 0.0),
             ((0, 0, 0, 0), 0.0)],
    "barinel": [((1, 0, 1, 1), 0.5), ((1, 0, 0, 2), 1.0), ((1, 0, 3, 0), 0.25), ((0, 1, 2, 0), 0.0),
                ((0, 0, 0, 0), 0.0)],
    "op2": [((1, 0, 0, 4), 1.0), ((1, 0, 2, 2), 0.6), ((0, 1, 1, 0), -0.5), ((1, 0, 1, 0), 0.5),
            ((0, 0, 0, 0), 0.0)],
}


def test_c04_formula_suite():
    t = time.perf_counter()
    bad = []
    for formula, rows in HAND.items():
        for counts, want in rows:
            got = statement_suspiciousness(SpectrumCounts(*counts), formula)
            if not (got == want or abs(got - want) <= 1e-12):
                bad.append((formula, counts, got, want))
    n = sum(map(len, HAND.values()))
    ok = not bad and set(HAND) == set(FORMULAE) and min(map(len, HAND.values())) >= 5
    record(4, "six-formula unit suite", ok, f"{n - len(bad)}/{n} hand values match; mismatches {bad}",
           time.perf_counter() - t, 1)


def test_c05_triage_oracle():
    t = time.perf_counter()
    rng = random.Random(2024)
    pass_out = CompilationOutcome.from_dict(PASS)
    models = agree = 0
    while models < 60:
        opts = [f"o{i}" for i in range(rng.randint(1, 12))]
        pred = random_predicate(rng, opts)
        table = truth_table(pred, opts)
        if not table[frozenset(opts)]:
            continue
        models += 1
        tri = triage_options(make_driver(pred, options={"O0": [], "O1": opts}), None, "O1", pass_out)
        expected = {o for o in opts if not table[frozenset(opts) - {o}]}
        agree += {o.name for o in tri.bug_triggering} == expected
    record(5, "triage vs exhaustive 2^n oracle", agree == models, f"{agree}/{models} models agree",
           time.perf_counter() - t, 60)


def test_c06_pair_invariants(corpus_report):
    report, elapsed = corpus_report
    pairs = sum(sum(b["pairs"].values()) for b in report["bugs"])
    violations = report["pair_violations"]
    record(6, "pair structural invariant", not violations and not report["errors"],
           f"{pairs} pairs over {len(report['bugs'])} models x 4 pair counts, {len(violations)} violations",
           elapsed, 60)


def test_c07_filter_safety(corpus_report):
    report, elapsed = corpus_report
    t = time.perf_counter()
    models = {m.name: m for m in bundled_models()}
    lost = [b["bug"] for b in report["bugs"]
            if set(b["faulty_suspicious"]) != set(models[b["bug"]].faulty_files)]
    c = report["candidates"]
    ok = not lost and c["suspicious"] < c["covered"] < c["all"] and len(report["bugs"]) == 20
    record(7, "filter safety", ok,
           f"mean files all {c['all']:.1f} > covered {c['covered']:.1f} > suspicious {c['suspicious']:.1f}; "
           f"faulty files lost in {lost or 'none'}", elapsed + time.perf_counter() - t, 60)


def test_c08_multi_pair_benefit(corpus_report):
    report, elapsed = corpus_report
    top1 = {s: m["top_n"]["1"] for s, m in report["settings"].items()}
    singles = {s: top1[s] for s in ("adv1", "adv2", "adv3", "k=1")}
    only = report["top1_only_aggregated"]
    ok = all(top1["k=3"] >= v for v in singles.values()) and bool(only)
    record(8, "multi-pair benefit", ok,
           f"Top-1 k=3 {top1['k=3']} vs single pairs {singles}; Top-1 only after aggregation: {only}",
           elapsed, 300)


def test_c09_statistics():
    t = time.perf_counter()
    rng = random.Random(9)
    self_half = all(a12(x, x) == 0.5 for x in ([1], [1, 1, 2], [3.5, -1, 2, 2, 9]))
    worst = 0.0
    for _ in range(1000):
        x = [rng.randint(0, 9) for _ in range(rng.randint(1, 15))]
        y = [rng.randint(0, 9) for _ in range(rng.randint(1, 15))]
        worst = max(worst, abs(a12(x, y) - pairwise_a12(x, y)))
    exact_ok = 0
    for m in range(1, 7):
        for n in range(1, 7):
            vals = rng.sample(range(1000), m + n)
            u, p = mann_whitney_u(vals[:m], vals[m:])
            u_ref, p_ref = enumerate_u_pvalue(vals[:m], vals[m:])
            exact_ok += u == u_ref and abs(p - p_ref) <= 1e-12
    ok = self_half and worst <= 1e-12 and exact_ok == 36
    record(9, "A12 and Mann-Whitney", ok,
           f"A12(x,x)=0.5: {self_half}; max |A12 - pairwise| = {worst:.1e}; exact MW matches {exact_ok}/36",
           time.perf_counter() - t, 60)


def test_c10_determinism(tmp_path, capsys):
    t = time.perf_counter()
    model = corpus_dir() / "m19.json"
    outputs = {}
    for jobs in (1, 8):
        for run in (1, 2):
            out = tmp_path / f"j{jobs}r{run}"
            code = cli_main(["localize", "--model", str(model), "--fail-level", _fail_level(model),
                             "--pass-level", _pass_level(model), "--jobs", str(jobs), "--out", str(out)])
            assert code == 0
            outputs[(jobs, run)] = ((out / "aggregate.tsv").read_bytes(), (out / "triage.json").read_bytes())
    capsys.readouterr()
    same_runs = all(outputs[(j, 1)] == outputs[(j, 2)] for j in (1, 8))
    same_jobs = outputs[(1, 1)] == outputs[(8, 1)]
    record(10, "determinism", same_runs and same_jobs,
           f"repeat runs identical: {same_runs}; --jobs 1 vs 8 identical: {same_jobs}",
           time.perf_counter() - t, 30)


def _levels(path):
    from optiso.drivers.simulated import SimulatedDriver, load_bug_model
    return SimulatedDriver(load_bug_model(path)).reproduction_levels()


def _fail_level(path):
    return _levels(path)[0].label


def _pass_level(path):
    return _levels(path)[1].label


def test_c11_formula_sweep(corpus_report):
    report, elapsed = corpus_report
    top1 = {k: report["settings"][f"formula={k}"]["top_n"]["1"] for k in FORMULAE}
    spread = max(top1.values()) - min(top1.values())
    ok = not report["errors"] and len(top1) == 6
    record(11, "formula-robustness sweep", ok,
           f"Top-1 per formula {top1}, spread {spread}; crashes {len(report['errors'])}", elapsed, 300)
