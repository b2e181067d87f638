"""``optiso`` command line: localize, triage and bench."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import TestProgram
from .errors import (
    DriverError,
    EmptyCorpus,
    NonReproducing,
    NoPassingLevel,
    OptisoError,
    ParseError,
    ValidationError,
)

EXIT_OK = 0
EXIT_NON_REPRODUCING = 2
EXIT_NO_PASSING_LEVEL = 3
EXIT_DRIVER = 4
EXIT_FAILURE = 1
EXIT_USAGE = 64
EXIT_DATA = 65

FALLBACK_NOTICE = "no single bug-triggering option; level-granularity fallback will apply"

log = logging.getLogger("optiso")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _driver_args(p):
    p.add_argument("--driver", choices=("sim", "external"), default="sim")
    p.add_argument("--model", type=Path, help="bug-model JSON (sim driver)")
    p.add_argument("--compiler", help="compiler command line (external driver)")
    p.add_argument("--program", type=Path, help="test program (external driver)")
    p.add_argument("--coverage-flags", default="",
                   help="extra flags that make the compiler dump its own coverage (external driver)")
    p.add_argument("--coverage-cmd", help="command printing coverage records after a build (external driver)")
    p.add_argument("--fail-level", required=True)
    p.add_argument("--pass-level", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path, default=Path("optiso-run"))


def build_parser():
    ap = _Parser(prog="optiso", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    loc = sub.add_parser("localize", help="rank compiler source files by suspiciousness")
    _driver_args(loc)
    loc.add_argument("--pairs", type=int, default=3, choices=(1, 3, 5, 10))
    loc.add_argument("--formula", default="ochiai")
    loc.add_argument("--no-filter", action="store_true")
    loc.add_argument("--top", type=int, default=20)

    tri = sub.add_parser("triage", help="classify the failing level's options")
    _driver_args(tri)

    bench = sub.add_parser("bench", help="ablation study over a corpus of bug models")
    bench.add_argument("--corpus", type=Path, help="directory of bug-model JSON files (default: bundled)")
    bench.add_argument("--ablate", choices=("pairs", "filter", "formula", "all"), default="all")
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--keep-going", action="store_true")
    bench.add_argument("--out", type=Path, default=Path("optiso-bench"))
    return ap


def make_driver(args):
    """Driver plus the program handle it compiles."""
    if args.driver == "sim":
        from .drivers.simulated import SimulatedDriver, load_bug_model

        if args.model is None:
            raise UsageError("--driver sim needs --model")
        if not args.model.is_file():
            raise UsageError(f"bug model {args.model} does not exist")
        model = load_bug_model(args.model)
        return SimulatedDriver(model), TestProgram(name=model.name)

    from .drivers.external import ExternalDriver

    if not args.compiler or args.program is None:
        raise UsageError("--driver external needs --compiler and --program")
    if not args.program.is_file():
        raise UsageError(f"test program {args.program} does not exist")
    driver = ExternalDriver(args.compiler, coverage_flags=tuple(args.coverage_flags.split()),
                            coverage_cmd=args.coverage_cmd)
    return driver, TestProgram.from_path(args.program)


def _subject(args):
    return {"model": str(args.model)} if args.driver == "sim" else {"program": str(args.program)}


def cmd_localize(args) -> int:
    from .localize import localize, write_run
    from .sbfl import formula_key

    try:
        formula = formula_key(args.formula)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    driver, program = make_driver(args)
    log.info("phase: localize")
    result = localize(driver, program, args.fail_level, args.pass_level, k=args.pairs,
                      formula=formula, use_filter=not args.no_filter, jobs=args.jobs)
    if not result.triage.bug_triggering:
        print(FALLBACK_NOTICE)
    write_run(args.out, result, {"driver": driver.describe(), **_subject(args), "k": args.pairs,
                                 "jobs": args.jobs, "seed": None})
    c = result.candidates.summary()
    print(f"files: {c['all']} total, {c['covered']} covered, {c['suspicious']} suspicious; "
          f"{len(result.pairs)} pair(s), formula {result.formula}")
    print("rank\tvotes\tfile")
    for entry in list(result.final)[:args.top]:
        print(f"{entry.rank}\t{entry.score:.4f}\t{entry.file}")
    print(f"artifacts written to {args.out}")
    return EXIT_OK


def cmd_triage(args) -> int:
    from .localize import write_triage
    from .pipeline import caching, triage_options

    driver, program = make_driver(args)
    driver = caching(driver)
    log.info("phase: triage")
    pass_conf = driver.enabled_options(driver.level(args.pass_level)).default()
    pass_result, _ = driver.compile_and_run(program, pass_conf, False)
    triage = triage_options(driver, program, args.fail_level, pass_result, args.jobs)
    args.out.mkdir(parents=True, exist_ok=True)
    path = write_triage(args.out, triage)
    print("bug-triggering: " + (" ".join(o.name for o in triage.bug_triggering) or "(none)"))
    print("bug-free: " + (" ".join(o.name for o in triage.bug_free) or "(none)"))
    if not triage.bug_triggering:
        print(FALLBACK_NOTICE)
    print(f"wrote {path}")
    return EXIT_OK


def _load_models(directory: Path, keep_going: bool):
    from .drivers.simulated import load_bug_model

    paths = sorted(directory.glob("*.json"))
    if not paths:
        raise EmptyCorpus(f"no bug models in {directory}")
    models, errors = [], {}
    for path in paths:
        try:
            models.append(load_bug_model(path))
        except (ParseError, ValidationError) as exc:
            if not keep_going:
                raise type(exc)(f"{path.name}: {exc}") from None
            errors[path.stem] = f"{type(exc).__name__}: {exc}"
            print(f"skipping {path.name}: {exc}", file=sys.stderr)
    return models, errors


def cmd_bench(args) -> int:
    from .corpus import corpus_dir
    from .evaluation import ABLATIONS, format_report, run_ablations

    directory = args.corpus or corpus_dir()
    models, load_errors = _load_models(directory, args.keep_going)
    if not models:
        raise EmptyCorpus(f"no loadable bug models in {directory}")
    ablations = ABLATIONS if args.ablate == "all" else (args.ablate,)
    report = run_ablations(models, ablations, args.jobs, args.keep_going)
    report["errors"] = {**load_errors, **report["errors"]}
    report["corpus"] = str(directory)
    text = format_report(report)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                                          encoding="utf-8")
    (args.out / "report.txt").write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK if not report["errors"] else EXIT_FAILURE


COMMANDS = {"localize": cmd_localize, "triage": cmd_triage, "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"optiso: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonReproducing as exc:
        print(f"optiso: non-reproducing (phase {args.command}): {exc}", file=sys.stderr)
        return EXIT_NON_REPRODUCING
    except NoPassingLevel as exc:
        print(f"optiso: no passing level (phase pair generation): {exc}", file=sys.stderr)
        return EXIT_NO_PASSING_LEVEL
    except DriverError as exc:
        print(f"optiso: driver error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_DRIVER
    except (EmptyCorpus, ParseError, ValidationError) as exc:
        print(f"optiso: bad input ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_DATA
    except OptisoError as exc:
        print(f"optiso: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
