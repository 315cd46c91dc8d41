"""
Flat ``key = value`` experiment files.

    # no-feedback throughput, two transmit probabilities
    experiment = throughput-nofeedback
    S = 100
    G = 0.2, 0.4, 0.6, 0.8, 1.0
    schemes = ncdp:p=0.9961, ncdp:p=0.0625

Blank lines and ``#`` comments are ignored; values stay strings and are
typed by ExperimentConfig.
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, Optional, Union

from ncdp.exceptions import ConfigError
from ncdp.experiments.models import ExecutionOptions, ExperimentConfig, canonical_key

logger = logging.getLogger(__name__)


def parse_assignment(text: str, where: str = "--set") -> Dict[str, str]:
    if "=" not in text:
        raise ConfigError(f"expected key=value, got '{text}'", field=where)
    key, value = text.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError("empty key", field=where)
    return {canonical_key(key): value.strip()}


def parse_lines(lines: Iterable[str]) -> Dict[str, str]:
    values: Dict[str, str] = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        entry = parse_assignment(line, where=f"line {number}")
        key = next(iter(entry))
        if key in values:
            logger.warning("line %d: '%s' set twice, keeping the last value", number, key)
        values.update(entry)
    return values


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Iterable[str] = (),
    seed: Optional[int] = None,
    execution: Optional[ExecutionOptions] = None,
) -> ExperimentConfig:
    """Read a config file (optional), apply ``--set`` overrides and the seed."""
    values: Dict[str, str] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}", field="config")
        values.update(parse_lines(path.read_text(encoding="utf-8").splitlines()))
    for item in overrides:
        values.update(parse_assignment(item))
    if seed is not None:
        values["master_seed"] = str(seed)
    if "experiment" not in values:
        raise ConfigError("no experiment named", field="experiment")
    return ExperimentConfig.from_mapping(values, execution)
