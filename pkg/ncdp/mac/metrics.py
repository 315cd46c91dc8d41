"""
Throughput, loss and energy metrics.

Standard errors treat frames as independent samples and use the ratio
estimator for quantities of the form sum(x_f) / sum(y_f).
"""

from dataclasses import asdict, dataclass
from typing import Any, Dict, Sequence, Tuple

import numpy as np


def ratio_estimate(numerators: Sequence[float], denominators: Sequence[float]) -> Tuple[float, float]:
    """sum(num) / sum(den) and its standard error over frames."""
    num = np.asarray(numerators, dtype=np.float64)
    den = np.asarray(denominators, dtype=np.float64)
    total = den.sum()
    if total <= 0:
        return 0.0, 0.0
    ratio = num.sum() / total
    frames = num.size
    if frames < 2:
        return float(ratio), 0.0
    resid = num - ratio * den
    se = np.sqrt(np.sum(resid ** 2) / (frames * (frames - 1))) / den.mean()
    return float(ratio), float(se)


@dataclass(frozen=True)
class Metrics:
    """
    Result of one simulated load point.

    ``arrivals``, ``delivered``, ``lost`` and ``backlog`` cover the whole
    run, warm-up included, so arrivals = delivered + lost + backlog.
    ``throughput``, ``loss`` and ``energy`` cover the measured frames.
    """
    load: float
    slots: int
    frames: int
    throughput: float
    loss: float
    energy: float
    throughput_stderr: float = 0.0
    loss_stderr: float = 0.0
    energy_stderr: float = 0.0
    arrivals: int = 0
    delivered: int = 0
    lost: int = 0
    backlog: int = 0
    transmissions: int = 0
    empirical_load: float = 0.0

    @classmethod
    def no_feedback(
        cls,
        load: float,
        slots: int,
        arrivals: Sequence[int],
        delivered: Sequence[int],
        transmissions: Sequence[int],
    ) -> "Metrics":
        arrivals = np.asarray(arrivals, dtype=np.int64)
        delivered = np.asarray(delivered, dtype=np.int64)
        transmissions = np.asarray(transmissions, dtype=np.int64)
        lost = arrivals - delivered
        loss, loss_se = ratio_estimate(lost, arrivals)
        energy, energy_se = ratio_estimate(transmissions, arrivals)
        frames = int(arrivals.size)
        return cls(
            load=load,
            slots=slots,
            frames=frames,
            throughput=load * (1.0 - loss),
            loss=loss,
            energy=energy,
            throughput_stderr=load * loss_se,
            loss_stderr=loss_se,
            energy_stderr=energy_se,
            arrivals=int(arrivals.sum()),
            delivered=int(delivered.sum()),
            lost=int(lost.sum()),
            backlog=0,
            transmissions=int(transmissions.sum()),
            empirical_load=float(arrivals.sum() / (slots * frames)) if frames else 0.0,
        )

    @classmethod
    def with_feedback(
        cls,
        load: float,
        slots: int,
        delivered: Sequence[int],
        delivered_transmissions: Sequence[int],
        totals: Dict[str, int],
        total_frames: int,
    ) -> "Metrics":
        """Metrics over the measured frames; ``totals`` carries the whole-run counters."""
        delivered = np.asarray(delivered, dtype=np.float64)
        frames = int(delivered.size)
        per_slot = delivered / slots
        measured = float(per_slot.mean()) if frames else 0.0
        measured_se = float(per_slot.std(ddof=1) / np.sqrt(frames)) if frames > 1 else 0.0
        if load > 0:
            loss = float(np.clip(1.0 - measured / load, 0.0, 1.0))
            loss_se = measured_se / load
        else:
            loss, loss_se = 0.0, 0.0
        energy, energy_se = ratio_estimate(delivered_transmissions, delivered)
        return cls(
            load=load,
            slots=slots,
            frames=frames,
            throughput=load * (1.0 - loss),
            loss=loss,
            energy=energy,
            throughput_stderr=measured_se,
            loss_stderr=loss_se,
            energy_stderr=energy_se,
            arrivals=totals["arrivals"],
            delivered=totals["delivered"],
            lost=totals["lost"],
            backlog=totals["backlog"],
            transmissions=int(np.sum(delivered_transmissions)),
            empirical_load=totals["arrivals"] / (slots * total_frames) if total_frames else 0.0,
        )

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)
