from ncdp.experiments.models import (
    ExecutionOptions,
    ExperimentConfig,
    ExperimentResult,
    Measurement,
    ResultMetadata,
    ResultRow,
)
from ncdp.experiments.registry import ExperimentRegistry, ExperimentSpec, experiment
from ncdp.experiments import definitions  # noqa: F401  registers the built-in experiments
from ncdp.experiments.configfile import load_config, parse_lines
from ncdp.experiments.runner import Diagnostic, run, validate, write_csv

__all__ = [
    "ExecutionOptions", "ExperimentConfig", "ExperimentResult", "Measurement",
    "ResultMetadata", "ResultRow", "ExperimentRegistry", "ExperimentSpec", "experiment",
    "load_config", "parse_lines", "Diagnostic", "run", "validate", "write_csv",
]
