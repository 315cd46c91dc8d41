"""
Experiment runner: validation, parallel execution and CSV emission.
"""

import logging
import time
from pathlib import Path
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict

import ncdp
from ncdp.analytic import sparsity_threshold
from ncdp.config import MAX_COLLISION_SIZE
from ncdp.exceptions import ConfigError, ExperimentError, UnknownExperimentError
from ncdp.experiments import definitions
from ncdp.experiments.models import (
    ExperimentConfig,
    ExperimentResult,
    ResultMetadata,
    ResultRow,
)
from ncdp.experiments.registry import ExperimentRegistry, ExperimentSpec
from ncdp.mac import Feedback, LinkConfig
from ncdp.runtime import TrialExecutor

logger = logging.getLogger(__name__)

PAYLOAD_BITS = LinkConfig().payload_bits


class Diagnostic(BaseModel):
    model_config = ConfigDict(frozen=True)

    severity: Literal["error", "warning"]
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.field}: {self.message}"


def _resolve(config: ExperimentConfig) -> ExperimentSpec:
    return ExperimentRegistry.get(config.experiment)


def validate(config: ExperimentConfig) -> List[Diagnostic]:
    """
    Cross-field checks of an experiment configuration. Returns the
    diagnostics instead of raising; an empty list means runnable.
    """
    out: List[Diagnostic] = []

    def error(field: str, message: str) -> None:
        out.append(Diagnostic(severity="error", field=field, message=message))

    def warning(field: str, message: str) -> None:
        out.append(Diagnostic(severity="warning", field=field, message=message))

    try:
        spec = _resolve(config)
    except UnknownExperimentError as e:
        return [Diagnostic(severity="error", field="experiment", message=str(e))]
    config = config.with_defaults(spec.defaults)

    for key in spec.requires:
        if not getattr(config, key):
            error(key, f"{spec.name} needs a non-empty {key} grid")

    if config.d is not None and config.d > config.slots:
        error("d", f"replicas exceed slots: d={config.d} > S={config.slots}")
    if spec.sweep == "G" and spec.name != "analytic-sweep":
        if not config.ideal_phy and not config.ebn0_db:
            error("ebn0_db", "full-PHY throughput needs an ebn0_db value")
        for text in config.schemes:
            try:
                definitions.parse_scheme(text, config, Feedback.NONE)
            except ConfigError as e:
                error("schemes", str(e).split(": ", 1)[-1])

    if spec.name in ("fer", "async-fer", "estimation-mse"):
        too_big = [k for k in config.collision_sizes if k > MAX_COLLISION_SIZE]
        if too_big:
            error("collision_sizes", f"XOR decoding is limited to k <= {MAX_COLLISION_SIZE}, got {too_big}")
    if spec.name == "async-fer":
        if not 0.0 <= config.dt_max <= 0.5:
            error("dt_max", f"relative delays must stay within half a symbol, got {config.dt_max}")
        for name in config.strategies:
            try:
                definitions.check_strategy(name)
            except ValueError as e:
                error("strategies", str(e))
    if config.max_freq_offset > 0.01:
        error("max_freq_offset", f"frequency offsets above 1% of the symbol rate are not modelled, got {config.max_freq_offset}")
    if spec.name in ("fer", "async-fer") or not config.ideal_phy:
        if PAYLOAD_BITS % config.field_bits:
            error("field_bits", f"{PAYLOAD_BITS} payload bits do not split into GF(2^{config.field_bits}) symbols")

    if config.p is not None and config.slots >= 2 and config.p < sparsity_threshold(config.slots):
        warning("p", f"p={config.p} is below ln(S)/S={sparsity_threshold(config.slots):.4f}; "
                     "expect a lower peak throughput")
    return out


def _errors(diagnostics: List[Diagnostic]) -> List[Diagnostic]:
    return [d for d in diagnostics if d.severity == "error"]


def run(
    config: ExperimentConfig,
    out: Optional[Union[str, Path]] = None,
    workers: Optional[int] = None,
    progress: Optional[bool] = None,
) -> ExperimentResult:
    """
    Run one experiment and, if ``out`` is given, write its CSV.

    Output depends only on the configuration and its master seed.
    """
    spec = _resolve(config)
    config = config.with_defaults(spec.defaults)
    diagnostics = validate(config)
    for d in diagnostics:
        if d.severity == "warning":
            logger.warning("%s", d)
    errors = _errors(diagnostics)
    if errors:
        raise ConfigError(errors[0].message, field=errors[0].field)

    executor = TrialExecutor(
        workers=workers if workers is not None else config.execution.workers,
        progress=progress if progress is not None else config.execution.progress,
    )
    start = time.perf_counter()
    points = spec.func(config)
    if not points:
        raise ExperimentError(f"{spec.name} planned no sweep points")
    outputs = executor.run(points, desc=spec.name)

    rows: List[ResultRow] = []
    for point, measurements in zip(sorted(points, key=lambda p: p.index), outputs):
        for m in measurements:
            rows.append(ResultRow(
                experiment=spec.name, series=point.series, sweep=spec.sweep, x=point.x,
                metric=m.metric, value=float(m.value), stderr=float(m.stderr), trials=int(m.trials),
            ))
    if spec.summarize is not None:
        rows.extend(spec.summarize(config, rows))

    meta = ResultMetadata(
        fingerprint=config.fingerprint,
        master_seed=config.master_seed,
        execution_time_ms=(time.perf_counter() - start) * 1000,
        points=len(points),
        workers=executor.workers,
        engine_version=ncdp.__version__,
    )
    result = ExperimentResult(rows=rows, meta=meta)
    logger.info("%s: %d rows from %d points in %.0f ms (fingerprint %s)",
                spec.name, len(rows), meta.points, meta.execution_time_ms, meta.fingerprint[:12])
    if out is not None:
        result = result.model_copy(update={"output": str(write_csv(result, out))})
    return result


def write_csv(result: ExperimentResult, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    result.to_frame().to_csv(path, index=False, float_format="%.10g", lineterminator="\n")
    logger.info("wrote %s", path)
    return path
