"""
Protocol configuration for the frame-level simulators.
"""

import hashlib
import json
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ncdp.config import DEFAULT_FIELD_BITS
from ncdp.galois import FieldSpec


class CoefficientPolicy(str, Enum):
    UNIFORM = "uniform"
    FIXED_PROBABILITY = "fixed-probability"
    FIXED_REPLICAS = "fixed-replicas"


class Feedback(str, Enum):
    NONE = "none"
    ARQ = "arq"


class Decoder(str, Enum):
    """Frame decoder: recover every determined message, or all-or-nothing on full rank."""
    ELIMINATION = "elimination"
    FULL_RANK = "full-rank"


class ProtocolConfig(BaseModel):
    """
    Frame, coefficient and feedback settings shared by NCDP, CRDSA and SA.

    ``p`` is only read by the fixed-probability policy and ``d`` by the
    fixed-replicas policy; the uniform policy transmits with
    probability 1 - 2^-n.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    slots: int = Field(150, ge=1, description="S, slots per frame")
    field_bits: int = Field(DEFAULT_FIELD_BITS, ge=1, le=16, description="n, coefficients live in GF(2^n)")
    reduction_poly: int = Field(0, ge=0, description="0 selects the default polynomial")
    policy: CoefficientPolicy = CoefficientPolicy.UNIFORM
    p: Optional[float] = Field(None, ge=0.0, le=1.0)
    d: Optional[int] = Field(None, ge=1)
    backlog: int = Field(50, ge=1, description="B, retransmission window in frames")
    feedback: Feedback = Feedback.NONE
    ideal_phy: bool = True
    decoder: Decoder = Decoder.ELIMINATION
    preamble_collisions: bool = False
    preamble_limit: bool = Field(True, description="cap active terminals per frame at the preamble set size")
    max_iterations: int = Field(20, ge=1, description="interference-cancellation rounds for CRDSA")
    warmup_frames: Optional[int] = Field(None, ge=0, description="ARQ warm-up, defaults to B")

    @model_validator(mode="after")
    def validate_policy(self) -> "ProtocolConfig":
        if self.policy is CoefficientPolicy.FIXED_PROBABILITY and self.p is None:
            raise ValueError("fixed-probability policy needs p")
        if self.policy is CoefficientPolicy.FIXED_REPLICAS:
            if self.d is None:
                raise ValueError("fixed-replicas policy needs d")
        if self.d is not None and self.d > self.slots:
            raise ValueError(f"replicas exceed slots: d={self.d} > S={self.slots}")
        if not self.preamble_limit and not self.ideal_phy:
            raise ValueError("the physical layer needs a finite preamble set, keep preamble_limit on")
        FieldSpec(self.field_bits, self.reduction_poly)
        return self

    @property
    def field_spec(self) -> FieldSpec:
        return FieldSpec(self.field_bits, self.reduction_poly)

    @property
    def transmit_probability(self) -> float:
        """Probability that a terminal uses a given slot."""
        if self.policy is CoefficientPolicy.UNIFORM:
            return 1.0 - 2.0 ** (-self.field_bits)
        if self.policy is CoefficientPolicy.FIXED_PROBABILITY:
            return float(self.p)
        return self.d / self.slots

    @property
    def expected_replicas(self) -> float:
        return self.slots * self.transmit_probability

    @property
    def warmup(self) -> int:
        return self.backlog if self.warmup_frames is None else self.warmup_frames

    @property
    def fingerprint(self) -> str:
        payload = json.dumps(self.model_dump(mode="json"), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()


class TrafficModel(BaseModel):
    """Poisson arrivals of G new messages per slot on average."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    load: float = Field(..., ge=0.0, description="G, offered load")

    def arrivals(self, rng: np.random.Generator, slots: int) -> int:
        return int(rng.poisson(self.load * slots))
