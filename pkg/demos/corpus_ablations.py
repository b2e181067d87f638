"""
Ablations over the bundled corpus
=================================

Pair counts, the candidate filter and six suspiciousness formulae, each
scored with Top-N, MFR and MAR against the corpus ground truth.
"""

from optiso.corpus import bundled_models
from optiso.evaluation import format_report, run_ablations

models = bundled_models()
print(len(models), "models:", ", ".join(m.name for m in models))

report = run_ablations(models)
print(format_report(report))

# A12 > 0.5 means the variant's first ranks tend to be worse than k=3's
for name in ("k=1", "adv1", "adv2", "adv3"):
    c = report["comparisons"][name]
    print(f"{name:6} A12={c['a12_default_better']:.3f}  p={c['p_value']:.3f}")
