"""
Talking to a real compiler
==========================

Lists the options gcc enables at -O2 and builds a small program under a
configuration with one option turned off. A stock gcc is not built with
coverage instrumentation, so spectra are skipped here.
"""

import shutil
import sys
import tempfile
from pathlib import Path

from optiso import ExternalDriver, TestProgram

if shutil.which("gcc") is None:
    sys.exit("gcc not found")

gcc = ExternalDriver("gcc")
o2 = gcc.enabled_options("O2")
print(len(o2), "options enabled at -O2, first few:", [o.name for o in list(o2)[:5]])

src = Path(tempfile.mkdtemp()) / "sum.c"
src.write_text("#include <stdio.h>\n"
               "int main(void) { long s = 0; for (int i = 0; i < 100; i++) s += i; printf(\"%ld\\n\", s); }\n")

conf = gcc.enabled_options("Os").configure(["expensive-optimizations"])
print(conf.format())
outcome, _ = gcc.compile_and_run(TestProgram.from_path(src), conf, want_coverage=False)
print(outcome)
