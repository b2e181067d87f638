"""Bundled simulated bug models (regenerate with ``python -m optiso.corpus.generate``)."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..drivers.simulated import load_bug_model
from ..errors import EmptyCorpus


def corpus_dir() -> Path:
    return Path(str(resources.files(__package__).joinpath("models")))


def load_corpus(directory=None):
    """Every ``*.json`` bug model in *directory* (default: the bundled corpus), sorted by name."""
    directory = Path(directory) if directory is not None else corpus_dir()
    paths = sorted(directory.glob("*.json"))
    if not paths:
        raise EmptyCorpus(f"no bug models in {directory}")
    return [load_bug_model(p) for p in paths]


def bundled_models():
    return load_corpus()
