"""Codec control-parameter types shared by codecs, search and CLI."""

from __future__ import annotations

import enum
from dataclasses import dataclass

__all__ = ["ParamKind", "ControlParameter", "ParameterRange", "QualityDirection"]


class ParamKind(str, enum.Enum):
    QUANTIZATION_STEP = "quantization_step"
    SCALING_FACTOR = "scaling_factor"
    BITS_PER_PIXEL = "bits_per_pixel"


# quantization step and scaling factor name the same knob on DCT-family coders
_EQUIVALENT = {
    ParamKind.QUANTIZATION_STEP: {ParamKind.QUANTIZATION_STEP, ParamKind.SCALING_FACTOR},
    ParamKind.SCALING_FACTOR: {ParamKind.QUANTIZATION_STEP, ParamKind.SCALING_FACTOR},
    ParamKind.BITS_PER_PIXEL: {ParamKind.BITS_PER_PIXEL},
}


def kinds_compatible(a: ParamKind, b: ParamKind) -> bool:
    return b in _EQUIVALENT[a]


class QualityDirection(str, enum.Enum):
    """How quality responds when the control parameter grows."""

    DECREASES = "metric_decreases_with_param"
    INCREASES = "metric_increases_with_param"


@dataclass(frozen=True, slots=True)
class ControlParameter:
    kind: ParamKind
    value: float

    def __post_init__(self):
        object.__setattr__(self, "kind", ParamKind(self.kind))
        object.__setattr__(self, "value", float(self.value))
        if not self.value > 0:
            raise ValueError(f"parameter value must be positive, got {self.value}")
        if self.kind is ParamKind.BITS_PER_PIXEL and not self.value <= 8:
            raise ValueError(f"bits_per_pixel must lie in (0, 8], got {self.value}")


@dataclass(frozen=True, slots=True)
class ParameterRange:
    kind: ParamKind
    min: float
    max: float

    def __post_init__(self):
        object.__setattr__(self, "kind", ParamKind(self.kind))
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "max", float(self.max))
        # endpoint validity is delegated to ControlParameter rules
        ControlParameter(self.kind, self.min)
        ControlParameter(self.kind, self.max)
        if not self.min < self.max:
            raise ValueError(f"range min must be below max, got [{self.min}, {self.max}]")

    @property
    def width(self) -> float:
        return self.max - self.min

    def at(self, value: float) -> ControlParameter:
        return ControlParameter(self.kind, value)

    def clamp(self, value: float) -> float:
        return min(max(value, self.min), self.max)
