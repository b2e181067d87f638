"""Seeded generator for the bundled simulated bug corpus.

Each model is built from per-file *profiles* ``(hot, base, first_half, second_half)``:
statement counts owned by the bug-triggering option(s), by the level's base
coverage, and by bug-free options in the first / second half of the option
order. Those halves are what the disable-all / disable-half / disable-none
pairs switch on and off, so the profile decides how a file's score moves
between pairs.

    python -m optiso.corpus.generate --out src/optiso/corpus/models
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

GCC_FILES = """
alias.c bb-reorder.c builtins.c calls.c cfgcleanup.c cfgexpand.c cfgloop.c cfgrtl.c combine.c
cprop.c cse.c dce.c df-core.c df-scan.c dojump.c dominance.c dse.c emit-rtl.c expmed.c expr.c
final.c fold-const.c function.c fwprop.c gcse.c gimple-fold.c gimple-match.c gimple-ssa-strength-reduction.c
gimple.c gimplify.c graphite.c haifa-sched.c ifcvt.c ipa-cp.c ipa-inline.c ipa-prop.c ipa-pure-const.c
ira-build.c ira-color.c ira.c loop-invariant.c loop-iv.c loop-unroll.c lower-subreg.c lra-constraints.c
lra.c optabs.c postreload.c predict.c recog.c ree.c reload.c reload1.c rtlanal.c sched-deps.c
simplify-rtx.c stor-layout.c tree-cfg.c tree-chrec.c tree-data-ref.c tree-if-conv.c tree-inline.c
tree-into-ssa.c tree-loop-distribution.c tree-predcom.c tree-scalar-evolution.c tree-sra.c
tree-ssa-alias.c tree-ssa-ccp.c tree-ssa-copy.c tree-ssa-dce.c tree-ssa-dom.c tree-ssa-forwprop.c
tree-ssa-ifcombine.c tree-ssa-loop-im.c tree-ssa-loop-ivopts.c tree-ssa-loop-manip.c tree-ssa-loop-niter.c
tree-ssa-math-opts.c tree-ssa-phiopt.c tree-ssa-pre.c tree-ssa-reassoc.c tree-ssa-sccvn.c tree-ssa-sink.c
tree-ssa-structalias.c tree-ssa-tail-merge.c tree-ssa-threadedge.c tree-ssa-threadupdate.c tree-ssa.c
tree-vect-data-refs.c tree-vect-generic.c tree-vect-loop-manip.c tree-vect-loop.c tree-vect-patterns.c
tree-vect-slp.c tree-vect-stmts.c tree-vrp.c tree.c var-tracking.c varasm.c
""".split()

GCC_OPTIONS = """
tree-ccp tree-dce tree-dominator-opts tree-forwprop tree-fre tree-sink tree-slsr tree-sra tree-copy-prop
tree-dse tree-ch tree-coalesce-vars tree-pta tree-ter tree-phiprop guess-branch-probability if-conversion
if-conversion2 inline-functions-called-once ipa-profile ipa-pure-const ipa-reference merge-constants
move-loop-invariants shrink-wrap split-wide-types compare-elim cprop-registers defer-pop
forward-propagate combine-stack-adjustments dce dse branch-count-reg ssa-phiopt toplevel-reorder
caller-saves code-hoisting crossjumping cse-follow-jumps expensive-optimizations gcse hoist-adjacent-loads
indirect-inlining ipa-cp ipa-icf ipa-ra ipa-sra ipa-vrp isolate-erroneous-paths-dereference lra-remat
optimize-sibling-calls optimize-strlen partial-inlining peephole2 reorder-blocks reorder-functions
rerun-cse-after-loop schedule-insns2 store-merging strict-aliasing thread-jumps tree-pre tree-switch-conversion
tree-tail-merge tree-vrp gcse-after-reload inline-functions ipa-cp-clone loop-interchange
peel-loops predictive-commoning split-loops split-paths tree-loop-distribution tree-loop-vectorize
tree-partial-pre tree-slp-vectorize unswitch-loops version-loops-for-strides
""".split()

LEVELS = ["O0", "O1", "O2", "O3"]
PASS = {"status": "RunOk", "exit_code": 0, "stdout": "0\n"}
WRONG_CODE = {"status": "RunAbort", "exit_code": 134}
ICE = {"status": "CompilerCrash", "exit_code": 4}

# Fluctuating-decoy template: the faulty file is steady inside the top five of
# every pair while different decoys take first place in each pair.
FLUCTUATING = {
    "faulty": (3, 1, 3, 2),
    "decoys": [(3, 0, 0, 11), (9, 8, 0, 11), (12, 5, 10, 8), (1, 9, 0, 5), (9, 6, 4, 2),
               (4, 8, 9, 1), (4, 3, 4, 10), (4, 3, 11, 4), (3, 11, 0, 1), (6, 4, 11, 0),
               (5, 1, 1, 9), (12, 5, 5, 9), (8, 9, 6, 10), (9, 3, 1, 10), (9, 1, 12, 7),
               (3, 5, 0, 8), (1, 4, 0, 3), (5, 2, 5, 7), (5, 7, 7, 1), (1, 0, 0, 4)],
}


class _Builder:
    def __init__(self, rng, name, fail_level):
        self.rng = rng
        self.name = name
        self.fail_level = fail_level
        self.pass_level = LEVELS[LEVELS.index(fail_level) - 1]
        pool = rng.sample(GCC_OPTIONS, 24)
        n1, n2, n3 = rng.randint(6, 8), rng.randint(4, 6), rng.randint(2, 4)
        self.options = {"O0": [], "O1": pool[:n1], "O2": pool[:n1 + n2], "O3": pool[:n1 + n2 + n3]}
        self.files = rng.sample(GCC_FILES, len(GCC_FILES))
        self.used = []
        self.next_line = {}
        self.base = {lvl: {} for lvl in LEVELS}
        self.option_cov = {}

    def take_file(self, name=None):
        f = name or next(x for x in self.files if x not in self.used)
        self.used.append(f)
        self.next_line.setdefault(f, self.rng.randint(1, 40) * 10)
        return f

    def lines(self, f, n):
        start = self.next_line[f]
        self.next_line[f] = start + n + self.rng.randint(0, 3)
        return list(range(start, start + n))

    def new_options(self):
        """Options enabled at the failing level but not at the passing one."""
        return [o for o in self.options[self.fail_level] if o not in self.options[self.pass_level]]

    def add_base(self, f, n, from_level="O0"):
        lines = self.lines(f, n)
        for lvl in LEVELS[LEVELS.index(from_level):]:
            self.base[lvl].setdefault(f, []).extend(lines)

    def add_option(self, opt, f, n):
        self.option_cov.setdefault(opt, []).extend([f, line] for line in self.lines(f, n))

    def spread(self, opts, f, n):
        for _ in range(n):
            self.add_option(self.rng.choice(opts), f, 1)

    def profile(self, f, hot, base, first, second, bug_opts, halves):
        for _ in range(hot):
            self.add_option(self.rng.choice(bug_opts), f, 1)
        if base:
            # mostly shared with the passing level, some failing-level only
            shared = self.rng.randint(0, base)
            if shared:
                self.add_base(f, shared, self.pass_level)
            if base - shared:
                self.add_base(f, base - shared, self.fail_level)
        if first:
            self.spread(halves[0], f, first)
        if second:
            self.spread(halves[1], f, second)

    def halves(self, bug_opts):
        bug_free = [o for o in self.options[self.fail_level] if o not in bug_opts]
        cut = -(-len(bug_free) // 2)
        return bug_free[:cut], bug_free[cut:]

    def background(self, covered_same=(4, 9), cold_diff=(6, 14), uncovered=(4, 10), halves=None):
        rng = self.rng
        for _ in range(rng.randint(*covered_same)):
            f = self.take_file()
            self.add_base(f, rng.randint(3, 20), rng.choice(LEVELS[:LEVELS.index(self.pass_level) + 1]))
        new = self.new_options()
        for _ in range(rng.randint(*cold_diff)):
            f = self.take_file()
            self.add_base(f, rng.randint(0, 10), self.pass_level)
            if new:
                self.spread(new, f, rng.randint(1, 5))
            if halves and rng.random() < 0.5:
                self.spread(halves[0] + halves[1], f, rng.randint(1, 4))
        later = [o for o in self.options["O3"] if o not in self.options[self.fail_level]]
        for _ in range(rng.randint(*uncovered)):
            f = self.take_file()
            if later and rng.random() < 0.5:
                self.add_option(rng.choice(later), f, rng.randint(1, 6))

    def document(self, predicate, faulty, fail_outcome=WRONG_CODE, description=""):
        files = sorted(self.used)
        return {
            "name": self.name,
            "description": description,
            "levels": LEVELS,
            "options": self.options,
            "files": files,
            "base_coverage": {lvl: {f: sorted(v) for f, v in sorted(per.items())}
                              for lvl, per in self.base.items()},
            "option_coverage": {o: sorted(v) for o, v in sorted(self.option_cov.items())},
            "bug_predicate": predicate,
            "faulty_files": sorted(faulty),
            "pass_outcome": PASS,
            "fail_outcome": fail_outcome,
        }


def _organic(rng, name, n_bug=1, conj=True, n_faulty=1):
    """A single- or multi-option bug with randomly drawn file profiles."""
    b = _Builder(rng, name, rng.choice(["O1", "O2", "O2", "O3"]))
    bug_opts = rng.sample(b.new_options(), n_bug)
    halves = b.halves(bug_opts)
    faulty = [b.take_file() for _ in range(n_faulty)]
    for f in faulty:
        b.profile(f, rng.randint(3, 8), rng.randint(2, 10), rng.randint(0, 4), rng.randint(0, 4),
                  bug_opts, halves)
    for _ in range(rng.randint(3, 9)):
        b.profile(b.take_file(), rng.randint(1, 6), rng.randint(0, 15), rng.randint(0, 6),
                  rng.randint(0, 6), bug_opts, halves)
    b.background(halves=halves)
    joiner = " AND " if conj else " OR "
    predicate = joiner.join(f"opt({o})" for o in bug_opts)
    kind = "ICE" if rng.random() < 0.1 else "wrong-code"
    return b.document(predicate, faulty, ICE if kind == "ICE" else WRONG_CODE,
                      f"{kind} bug, predicate {predicate}")


def _fluctuating(rng, name):
    b = _Builder(rng, name, rng.choice(["O2", "O3"]))
    bug_opts = rng.sample(b.new_options(), 1)
    halves = b.halves(bug_opts)
    faulty = b.take_file()
    b.profile(faulty, *FLUCTUATING["faulty"], bug_opts, halves)
    for prof in FLUCTUATING["decoys"]:
        b.profile(b.take_file(), *prof, bug_opts, halves)
    b.background(halves=None)
    predicate = f"opt({bug_opts[0]})"
    return b.document(predicate, [faulty], WRONG_CODE,
                      "fluctuating decoys: a different file leads each pair while the "
                      "faulty file stays in every pair's top five")


def _interaction(rng, name):
    """Bug needs one of two bug-free options; disabling all of them hides it."""
    b = _Builder(rng, name, "O2")
    bug = rng.choice(b.new_options())
    others = [o for o in b.options["O2"] if o != bug]
    g1, g2 = others[0], others[1]
    halves = b.halves([bug])
    faulty = b.take_file()
    b.profile(faulty, 5, 4, 1, 1, [bug], halves)
    for _ in range(6):
        b.profile(b.take_file(), rng.randint(1, 5), rng.randint(0, 12), rng.randint(0, 5),
                  rng.randint(0, 5), [bug], halves)
    b.background(halves=halves)
    predicate = f"opt({bug}) AND (opt({g1}) OR opt({g2}))"
    return b.document(predicate, [faulty], WRONG_CODE, f"option interaction, predicate {predicate}")


def _level_only(rng, name, predicate_kind):
    b = _Builder(rng, name, rng.choice(["O2", "O3"]))
    new = b.new_options()
    faulty = b.take_file()
    if predicate_kind == "or":
        bug_opts = rng.sample(new, 2)
        predicate = " OR ".join(f"opt({o})" for o in bug_opts)
        b.add_option(bug_opts[0], faulty, rng.randint(3, 6))
        b.add_option(bug_opts[1], faulty, rng.randint(3, 6))
    else:
        predicate = f"level_at_least({b.fail_level})"
        b.add_base(faulty, rng.randint(4, 8), b.fail_level)
    b.add_base(faulty, rng.randint(2, 6), "O0")
    for _ in range(rng.randint(4, 8)):
        f = b.take_file()
        b.add_base(f, rng.randint(2, 12), "O0")
        b.add_base(f, rng.randint(1, 4), b.fail_level)
    b.background()
    return b.document(predicate, [faulty], WRONG_CODE,
                      "no single option conceals the bug; level-granularity fallback")


def tiny_model():
    """Three files, one bug option, two bug-free options; small enough to trace by hand."""
    return {
        "name": "m07",
        "description": "three-file model for hand-checked ranking",
        "levels": ["O0", "O1"],
        "options": {"O0": [], "O1": ["x", "p", "q"]},
        "files": ["fold.c", "loop.c", "tree.c"],
        "base_coverage": {"O0": {"tree.c": [1, 2]}, "O1": {"tree.c": [1, 2], "loop.c": [1]}},
        "option_coverage": {
            "x": [["fold.c", 10], ["fold.c", 11], ["loop.c", 5]],
            "p": [["loop.c", 6], ["tree.c", 3]],
            "q": [["fold.c", 12], ["loop.c", 7]],
        },
        "bug_predicate": "opt(x)",
        "faulty_files": ["fold.c"],
        "pass_outcome": PASS,
        "fail_outcome": WRONG_CODE,
    }


def build_corpus(seed=2024):
    rng = random.Random(seed)
    docs = []
    for i in range(1, 21):
        name = f"m{i:02d}"
        if i == 7:
            docs.append(tiny_model())
        elif i in (11, 12):
            docs.append(_organic(rng, name, n_bug=2))
        elif i == 13:
            docs.append(_interaction(rng, name))
        elif i == 14:
            docs.append(_level_only(rng, name, "or"))
        elif i == 15:
            docs.append(_level_only(rng, name, "level"))
        elif i == 16:
            docs.append(_organic(rng, name, n_faulty=2))
        elif i >= 18:
            docs.append(_fluctuating(rng, name))
        else:
            docs.append(_organic(rng, name))
    return docs


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path(__file__).parent / "models")
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    for doc in build_corpus(args.seed):
        path = args.out / f"{doc['name']}.json"
        path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")
        print(path)


if __name__ == "__main__":
    main()
