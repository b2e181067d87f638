import json

import pytest

from optiso.drivers.simulated import SimulatedDriver, load_bug_model

PASS = {"status": "RunOk", "exit_code": 0, "stdout": "ok\n"}
FAIL = {"status": "RunAbort", "exit_code": 134}


def model_doc(predicate, options=None, levels=None, files=None, base=None, cov=None, faulty=None):
    """A small bug-model document; single level O1 over options x, y, z by default."""
    levels = levels or ["O0", "O1"]
    options = options if options is not None else {"O0": [], "O1": ["x", "y", "z"]}
    files = files or ["a.c", "b.c", "c.c"]
    names = [o for opts in options.values() for o in opts]
    if cov is None:
        cov = {o: [[files[i % len(files)], 10 + i]] for i, o in enumerate(dict.fromkeys(names))}
    return {
        "name": "t",
        "levels": levels,
        "options": options,
        "files": files,
        "base_coverage": base if base is not None else {lvl: {files[0]: [1]} for lvl in levels},
        "option_coverage": cov,
        "bug_predicate": predicate,
        "faulty_files": faulty or [files[0]],
        "pass_outcome": PASS,
        "fail_outcome": FAIL,
    }


def make_driver(predicate, **kw):
    return SimulatedDriver(load_bug_model(model_doc(predicate, **kw)))


@pytest.fixture
def xyz_driver():
    return make_driver


@pytest.fixture
def write_model(tmp_path):
    def write(doc, name="model.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return path
    return write


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
