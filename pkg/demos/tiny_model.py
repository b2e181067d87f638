"""
Localizing a bug in a three-file simulated compiler
===================================================

"""

from optiso import SimulatedDriver, load_bug_model, localize
from optiso.corpus import corpus_dir

# m07 enables options x, p and q at O1; the bug follows x and lives in fold.c
model = load_bug_model(corpus_dir() / "m07.json")
driver = SimulatedDriver(model)
print(model.bug_predicate, "->", sorted(model.faulty_files))

result = localize(driver, None, "O1", "O0")

# disabling x alone hides the bug, so x is the only bug-triggering option
print("bug-triggering:", [o.name for o in result.triage.bug_triggering])
print("bug-free:", [o.name for o in result.triage.bug_free])

# three pairs: p and q all disabled, half disabled, none disabled
for pair, ranking in zip(result.pairs, result.rankings):
    print(pair.fail_conf.format(), "vs", [c.format() for c in pair.pass_confs])
    for e in ranking:
        print("   ", e.rank, e.file, round(e.score, 4))

print("aggregate:")
for e in result.final:
    print("   ", e.rank, e.file, e.score)
