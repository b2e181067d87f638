import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from optiso.cli import (
    EXIT_DATA,
    EXIT_DRIVER,
    EXIT_NO_PASSING_LEVEL,
    EXIT_NON_REPRODUCING,
    EXIT_USAGE,
    FALLBACK_NOTICE,
    main,
)
from optiso.corpus import corpus_dir

from conftest import model_doc

M07 = str(corpus_dir() / "m07.json")


def run(*argv):
    return main([str(a) for a in argv])


def test_localize_tiny_model(tmp_path, capsys):
    out = tmp_path / "run"
    assert run("localize", "--model", M07, "--fail-level", "O1", "--pass-level", "O0", "--out", out) == 0
    text = capsys.readouterr().out
    assert "1\t15.0000\tfold.c" in text
    manifest = json.loads((out / "manifest.json").read_text())
    for name in list(manifest["artifacts"].values()) + list(manifest["spectra"].values()):
        assert (out / name).is_file()
    assert manifest["k"] == 3 and manifest["o_fail"] == "O1"
    assert (out / "aggregate.tsv").read_text().startswith("1\tfold.c\t15.000000\t1,1,1\n")


def test_localize_single_pair(tmp_path):
    out = tmp_path / "run"
    assert run("localize", "--model", M07, "--fail-level", "O1", "--pass-level", "O0",
               "--pairs", 1, "--out", out) == 0
    assert sorted(p.name for p in out.glob("rank.*.tsv")) == ["rank.adv1.tsv"]
    rank = [line.split("\t")[1] for line in (out / "rank.adv1.tsv").read_text().splitlines()]
    agg = [line.split("\t")[1] for line in (out / "aggregate.tsv").read_text().splitlines()]
    assert rank == agg


def test_missing_fail_level_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        run("localize", "--model", M07, "--pass-level", "O0")
    assert exc.value.code == EXIT_USAGE


def test_other_usage_errors(tmp_path):
    assert run("localize", "--fail-level", "O1", "--pass-level", "O0") == EXIT_USAGE
    assert run("localize", "--model", tmp_path / "nope.json", "--fail-level", "O1",
               "--pass-level", "O0") == EXIT_USAGE
    assert run("localize", "--model", M07, "--fail-level", "O1", "--pass-level", "O0",
               "--formula", "jaccard") == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        run("frobnicate")
    assert exc.value.code == EXIT_USAGE


def test_non_reproducing(tmp_path, write_model):
    path = write_model(model_doc("opt(x)"))
    assert run("localize", "--model", path, "--fail-level", "O0", "--pass-level", "O0",
               "--out", tmp_path / "r") == EXIT_NON_REPRODUCING
    assert run("triage", "--model", path, "--fail-level", "O0", "--pass-level", "O0",
               "--out", tmp_path / "r") == EXIT_NON_REPRODUCING


def test_pass_level_that_also_fails(tmp_path, write_model):
    doc = model_doc("opt(y) OR opt(z) OR level_at_least(O1)", levels=["O0", "O1", "O2"],
                    options={"O0": [], "O1": ["x"], "O2": ["x", "y", "z"]})
    doc["base_coverage"]["O0"] = {"b.c": [1]}
    path = write_model(doc)
    # O1 fails as well, so O2 vs O1 shows no behavioural difference
    assert run("localize", "--model", path, "--fail-level", "O2", "--pass-level", "O1",
               "--out", tmp_path / "a") == EXIT_NON_REPRODUCING
    assert run("localize", "--model", path, "--fail-level", "O2", "--pass-level", "O0",
               "--out", tmp_path / "b") == 0


def test_no_passing_level_exit_code(tmp_path, write_model, monkeypatch):
    from optiso import pipeline
    from optiso.errors import NoPassingLevel

    def boom(*a, **k):
        raise NoPassingLevel("nothing below O2 conceals the bug")
    monkeypatch.setattr(pipeline, "level_only_pair", boom)
    doc = model_doc("opt(x) OR opt(y)")
    assert run("localize", "--model", write_model(doc), "--fail-level", "O1", "--pass-level", "O0",
               "--out", tmp_path / "r") == EXIT_NO_PASSING_LEVEL


def test_unknown_level_is_driver_error(tmp_path):
    assert run("localize", "--model", M07, "--fail-level", "O7", "--pass-level", "O0",
               "--out", tmp_path / "r") == EXIT_DRIVER


def test_external_driver_unavailable(tmp_path):
    prog = tmp_path / "p.c"
    prog.write_text("int main(){return 0;}\n")
    assert run("triage", "--driver", "external", "--compiler", "/nonexistent/cc", "--program", prog,
               "--fail-level", "O1", "--pass-level", "O0", "--out", tmp_path / "r") == EXIT_DRIVER


def test_triage_and_determinism(tmp_path, write_model, capsys):
    path = write_model(model_doc("opt(x) AND opt(y)"))
    for d in ("a", "b"):
        assert run("triage", "--model", path, "--fail-level", "O1", "--pass-level", "O0",
                   "--out", tmp_path / d) == 0
    assert "bug-triggering: x y" in capsys.readouterr().out
    assert (tmp_path / "a" / "triage.json").read_bytes() == (tmp_path / "b" / "triage.json").read_bytes()


def test_triage_fallback_notice(tmp_path, write_model, capsys):
    path = write_model(model_doc("opt(x) OR opt(y)"))
    assert run("triage", "--model", path, "--fail-level", "O1", "--pass-level", "O0",
               "--out", tmp_path / "t") == 0
    assert FALLBACK_NOTICE in capsys.readouterr().out


def test_bench_pairs(tmp_path, capsys):
    corpus = tmp_path / "c"
    corpus.mkdir()
    for name in ("m01", "m07"):
        shutil.copy(corpus_dir() / f"{name}.json", corpus)
    assert run("bench", "--corpus", corpus, "--ablate", "pairs", "--out", tmp_path / "o") == 0
    text = capsys.readouterr().out
    for k in (1, 3, 5, 10):
        assert f"k={k} " in text
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert set(report["settings"]) >= {"k=1", "k=3", "k=5", "k=10"}


def test_bench_formula_rows(tmp_path, capsys):
    corpus = tmp_path / "c"
    corpus.mkdir()
    shutil.copy(corpus_dir() / "m07.json", corpus)
    assert run("bench", "--corpus", corpus, "--ablate", "formula", "--out", tmp_path / "o") == 0
    rows = [line.split()[0] for line in capsys.readouterr().out.splitlines() if line.startswith("formula=")]
    assert rows == [f"formula={k}" for k in ("ochiai", "tarantula", "dstar2", "dice", "barinel", "op2")]


def test_bench_corrupt_model(tmp_path, capsys):
    corpus = tmp_path / "c"
    corpus.mkdir()
    shutil.copy(corpus_dir() / "m07.json", corpus)
    (corpus / "m99.json").write_text('{"levels": [')
    assert run("bench", "--corpus", corpus, "--out", tmp_path / "o") == EXIT_DATA
    assert "m99.json" in capsys.readouterr().err
    code = run("bench", "--corpus", corpus, "--keep-going", "--out", tmp_path / "o")
    assert code != 0
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert "m99" in report["errors"]
    assert report["settings"]["k=3"]["top_n"]["1"] == 1


def test_bench_empty_corpus(tmp_path):
    (tmp_path / "empty").mkdir()
    assert run("bench", "--corpus", tmp_path / "empty", "--out", tmp_path / "o") == EXIT_DATA


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "optiso", "localize", "--model", M07, "--fail-level", "O1",
                           "--pass-level", "O0", "--out", str(tmp_path / "r")],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "fold.c" in proc.stdout
    assert Path(tmp_path / "r" / "aggregate.tsv").is_file()
