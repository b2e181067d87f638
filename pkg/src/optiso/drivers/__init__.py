from .external import ExternalDriver, build_command, external_compile_and_run, parse_optimizer_help
from .simulated import BugModel, SimulatedDriver, load_bug_model, simulate

__all__ = [
    "BugModel",
    "ExternalDriver",
    "SimulatedDriver",
    "build_command",
    "external_compile_and_run",
    "load_bug_model",
    "parse_optimizer_help",
    "simulate",
]
