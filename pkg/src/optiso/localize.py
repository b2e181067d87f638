"""End-to-end localization run and its on-disk artifacts."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .aggregation import aggregate, format_aggregate_tsv
from .coverage import format_canonical
from .errors import NonReproducing
from .pipeline import (
    CandidateSet,
    OptionTriage,
    build_pair_suite,
    caching,
    filter_candidates,
    run_all,
    triage_options,
)
from .sbfl import FileRanking, formula_key, rank_files

log = logging.getLogger(__name__)


@dataclass
class LocalizationResult:
    o_fail: object
    o_pass: object
    candidates: CandidateSet
    triage: OptionTriage
    pairs: list
    spectra: dict
    rankings: list
    final: FileRanking
    formula: str
    executions: int = 0


def localize(driver, program, o_fail, o_pass, k=3, formula="ochiai", use_filter=True,
             jobs=1, symmetric_filter=False) -> LocalizationResult:
    """Run the five steps and return every intermediate product."""
    driver = caching(driver)
    formula = formula_key(formula)
    o_fail, o_pass = driver.level(o_fail), driver.level(o_pass)
    fail_space, pass_space = driver.enabled_options(o_fail), driver.enabled_options(o_pass)

    (fail_res, fail_spec), (pass_res, pass_spec) = run_all(
        driver, program, [fail_space.default(), pass_space.default()], jobs, want_coverage=True)
    if fail_res == pass_res:
        raise NonReproducing(f"{o_fail} and {o_pass} behave identically ({fail_res})")

    candidates = filter_candidates(fail_spec, pass_spec, driver.source_files(), symmetric_filter)
    if not use_filter:
        candidates = CandidateSet.unfiltered(candidates.all_files)
    log.info("candidates: %s", candidates.summary())

    triage = triage_options(driver, program, o_fail, pass_res, jobs)
    pairs = build_pair_suite(driver, program, o_fail, o_pass, triage, k, jobs)

    confs = list(dict.fromkeys(c for p in pairs for c in p.configurations()))
    spectra = dict(zip(confs, (s for _, s in run_all(driver, program, confs, jobs, want_coverage=True))))
    rankings = [rank_files(p, spectra, candidates, formula) for p in pairs]
    final = aggregate(rankings)
    return LocalizationResult(o_fail, o_pass, candidates, triage, pairs, spectra, rankings, final,
                              formula, driver.executions)


def _dump_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_triage(run_dir, triage: OptionTriage) -> Path:
    path = Path(run_dir) / "triage.json"
    _dump_json(path, triage.to_dict())
    return path


def write_run(run_dir, result: LocalizationResult, manifest_extra=None) -> dict:
    """Persist every phase's artifacts, then the manifest listing them."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat()
    artifacts = {"triage": write_triage(run_dir, result.triage)}

    candidates = run_dir / "candidates.json"
    _dump_json(candidates, {**result.candidates.summary(), "filtered": result.candidates.filtered,
                            "suspicious_files": sorted(result.candidates.suspicious_files)})
    artifacts["candidates"] = candidates

    pairs = run_dir / "pairs.json"
    _dump_json(pairs, [p.to_dict() for p in result.pairs])
    artifacts["pairs"] = pairs

    spectra = {}
    for conf, spec in result.spectra.items():
        path = run_dir / f"spectrum.{conf.digest()}.tsv"
        path.write_text(format_canonical(spec), encoding="utf-8")
        spectra[conf.format()] = path
    for ranking in result.rankings:
        path = run_dir / f"rank.{ranking.pair_id}.tsv"
        path.write_text(ranking.to_tsv(), encoding="utf-8")
        artifacts[f"rank.{ranking.pair_id}"] = path
    agg = run_dir / "aggregate.tsv"
    agg.write_text(format_aggregate_tsv(result.final, result.rankings), encoding="utf-8")
    artifacts["aggregate"] = agg

    manifest = {
        "tool_version": __version__,
        "o_fail": result.o_fail.label,
        "o_pass": result.o_pass.label,
        "pairs": len(result.pairs),
        "formula": result.formula,
        "filtered": result.candidates.filtered,
        "executions": result.executions,
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
        "artifacts": {k: v.name for k, v in sorted(artifacts.items())},
        "spectra": {k: v.name for k, v in sorted(spectra.items())},
        **(manifest_extra or {}),
    }
    _dump_json(run_dir / "manifest.json", manifest)
    return manifest
