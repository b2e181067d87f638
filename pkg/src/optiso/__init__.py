"""Compiler fault isolation from multiple adversarial compilation-configuration pairs."""

__version__ = "0.1.0"

from .aggregation import aggregate, vote_weight
from .config import (
    CompilationOutcome,
    CompilerDriver,
    Configuration,
    FineGrainedOption,
    OptimizationLevel,
    OptionSpace,
    OutcomeStatus,
    TestProgram,
)
from .coverage import CoverageSpectrum, RawCoverageRecord, parse_coverage
from .drivers import ExternalDriver, SimulatedDriver, load_bug_model
from .localize import localize
from .sbfl import FileRanking, SpectrumCounts, rank_files, statement_suspiciousness

__all__ = [
    "CompilationOutcome",
    "CompilerDriver",
    "Configuration",
    "CoverageSpectrum",
    "ExternalDriver",
    "FileRanking",
    "FineGrainedOption",
    "OptimizationLevel",
    "OptionSpace",
    "OutcomeStatus",
    "RawCoverageRecord",
    "SimulatedDriver",
    "SpectrumCounts",
    "TestProgram",
    "aggregate",
    "load_bug_model",
    "localize",
    "parse_coverage",
    "rank_files",
    "statement_suspiciousness",
    "vote_weight",
]
