"""Driver that shells out to a real compiler and ingests gcov-style coverage."""

from __future__ import annotations

import logging
import os
import re
import shlex
import signal
import subprocess
import tempfile
from pathlib import Path

from ..config import (
    CompilationOutcome,
    CompilerDriver,
    Configuration,
    OptimizationLevel,
    OptionSpace,
    OutcomeStatus,
    TestProgram,
)
from ..coverage import (
    CANONICAL,
    GCOV_INTERMEDIATE,
    CoverageSpectrum,
    parse_coverage,
)
from ..errors import CoverageUnavailable, DriverUnavailable, LevelUnknown, Timeout

log = logging.getLogger(__name__)

# GCC's documented coarse levels, weakest first.
DEFAULT_LEVELS = ("O0", "O1", "Os", "O2", "O3")

TIMEOUT_EXIT_CODE = 124
SIGABRT_EXIT_CODE = 128 + signal.SIGABRT
DEFAULT_COMPILE_TIMEOUT = 60.0
DEFAULT_RUN_TIMEOUT = 10.0

_ENABLED_RE = re.compile(r"^\s+-f(?P<name>[A-Za-z0-9][\w+.-]*)\s+\[enabled\]\s*$")


def scratch_root():
    return os.environ.get("OPTISO_TMPDIR") or None


def _split(cmd):
    return shlex.split(cmd) if isinstance(cmd, str) else list(cmd)


def build_command(compiler_cmd, conf: Configuration, program, output="a.out", coverage_flags=()):
    """``<compiler> -<level> -fno-<opt>... <coverage flags> <program> -o <output>``."""
    return [*_split(compiler_cmd), *conf.flags(), *coverage_flags, str(program), "-o", str(output)]


def parse_optimizer_help(text: str) -> list[str]:
    """Names of ``[enabled]`` flags in ``-Q --help=optimizers`` output, in reported order."""
    names = []
    for line in text.splitlines():
        m = _ENABLED_RE.match(line)
        if m and not m.group("name").endswith("="):
            names.append(m.group("name"))
    return names


def _exit_code(returncode):
    # subprocess reports death-by-signal as -signum; use the shell's 128+n convention
    return 128 - returncode if returncode < 0 else returncode


def _collect_coverage(workdir: Path, coverage_cmd, timeout):
    if coverage_cmd:
        try:
            proc = subprocess.run(_split(coverage_cmd), cwd=workdir, capture_output=True,
                                  timeout=timeout, env={**os.environ, "GCOV_PREFIX": str(workdir)})
        except FileNotFoundError as exc:
            raise DriverUnavailable(f"coverage command not found: {exc}") from None
        except subprocess.TimeoutExpired:
            raise Timeout(f"coverage command exceeded {timeout}s") from None
        if proc.returncode != 0:
            raise CoverageUnavailable(proc.stderr.decode(errors="replace").strip()
                                      or f"coverage command exited {proc.returncode}")
        text = proc.stdout.decode()
        fmt = GCOV_INTERMEDIATE if text.lstrip().startswith(("file:", "version:")) else CANONICAL
        return CoverageSpectrum.from_records(parse_coverage(text, fmt))

    records = []
    for path in sorted(workdir.rglob("*.tsv")):
        records += parse_coverage(path.read_text(), CANONICAL)
    for path in sorted(workdir.rglob("*.gcov")):
        records += parse_coverage(path.read_text(errors="replace"), GCOV_INTERMEDIATE)
    if not records:
        raise CoverageUnavailable(f"no coverage files were emitted under {workdir}")
    return CoverageSpectrum.from_records(records)


def external_compile_and_run(compiler_cmd, program: TestProgram, conf: Configuration, workdir,
                             *, want_coverage=True, coverage_flags=(), coverage_cmd=None,
                             compile_timeout=DEFAULT_COMPILE_TIMEOUT,
                             run_timeout=DEFAULT_RUN_TIMEOUT):
    workdir = Path(workdir)
    exe = workdir / "a.out"
    argv = build_command(compiler_cmd, conf, Path(program.path).resolve(), exe, coverage_flags)
    env = {**os.environ, "GCOV_PREFIX": str(workdir)}
    log.debug("compile: %s", shlex.join(argv))
    try:
        proc = subprocess.run(argv, cwd=workdir, capture_output=True, timeout=compile_timeout, env=env)
    except FileNotFoundError as exc:
        raise DriverUnavailable(f"cannot execute compiler: {exc}") from None
    except subprocess.TimeoutExpired:
        raise Timeout(f"compilation exceeded {compile_timeout}s: {shlex.join(argv)}") from None

    if proc.returncode != 0:
        outcome = CompilationOutcome(OutcomeStatus.COMPILER_CRASH, _exit_code(proc.returncode))
    else:
        try:
            run = subprocess.run([str(exe)], cwd=workdir, capture_output=True, timeout=run_timeout)
        except subprocess.TimeoutExpired:
            outcome = CompilationOutcome(OutcomeStatus.RUN_ABORT, TIMEOUT_EXIT_CODE)
        else:
            if run.returncode != 0:
                outcome = CompilationOutcome(OutcomeStatus.RUN_ABORT, _exit_code(run.returncode))
            else:
                outcome = CompilationOutcome.ok(run.stdout)

    spectrum = CoverageSpectrum.empty()
    if want_coverage:
        spectrum = _collect_coverage(workdir, coverage_cmd, compile_timeout)
    return outcome, spectrum


class ExternalDriver(CompilerDriver):
    """Wraps a real compiler command line such as ``gcc`` or ``/opt/gcc-6/bin/gcc``.

    Coverage of the compiler itself is gathered either by *coverage_cmd*
    (run in the scratch directory, printing canonical or gcov-intermediate
    text) or from ``*.gcov``/``*.tsv`` files the instrumented compiler leaves
    in the scratch directory (``GCOV_PREFIX`` points there).
    """

    kind = "external"

    def __init__(self, compiler_cmd, *, levels=DEFAULT_LEVELS, coverage_flags=(), coverage_cmd=None,
                 compile_timeout=DEFAULT_COMPILE_TIMEOUT, run_timeout=DEFAULT_RUN_TIMEOUT):
        self.compiler_cmd = _split(compiler_cmd)
        self._levels = [OptimizationLevel(i, label) for i, label in enumerate(levels)]
        self.coverage_flags = tuple(coverage_flags)
        self.coverage_cmd = coverage_cmd
        self.compile_timeout = compile_timeout
        self.run_timeout = run_timeout
        self._spaces = {}

    def levels(self):
        return list(self._levels)

    def enabled_options(self, level):
        label = level.label if isinstance(level, OptimizationLevel) else level
        lvl = next((x for x in self._levels if x.label == label), None)
        if lvl is None:
            raise LevelUnknown(f"unknown optimization level {label!r}")
        if label not in self._spaces:
            argv = [*self.compiler_cmd, "-Q", "--help=optimizers", lvl.flag]
            try:
                proc = subprocess.run(argv, capture_output=True, timeout=self.compile_timeout)
            except (FileNotFoundError, PermissionError) as exc:
                raise DriverUnavailable(f"cannot execute compiler: {exc}") from None
            except subprocess.TimeoutExpired:
                raise Timeout(f"option query exceeded {self.compile_timeout}s") from None
            if proc.returncode != 0:
                raise DriverUnavailable(proc.stderr.decode(errors="replace").strip())
            names = parse_optimizer_help(proc.stdout.decode(errors="replace"))
            self._spaces[label] = OptionSpace.from_names(lvl, names)
        return self._spaces[label]

    def compile_and_run(self, program, conf, want_coverage=True):
        if program is None or program.path is None:
            raise DriverUnavailable("the external driver needs a program path")
        with tempfile.TemporaryDirectory(prefix="optiso-", dir=scratch_root()) as tmp:
            return external_compile_and_run(
                self.compiler_cmd, program, conf, tmp, want_coverage=want_coverage,
                coverage_flags=self.coverage_flags, coverage_cmd=self.coverage_cmd,
                compile_timeout=self.compile_timeout, run_timeout=self.run_timeout)

    def describe(self):
        return {"kind": self.kind, "compiler": shlex.join(self.compiler_cmd),
                "coverage_cmd": self.coverage_cmd, "compile_timeout": self.compile_timeout}

