"""Deterministic stub codec with a prescribed quality-vs-parameter response.

The stub lets search procedures be tested against closed-form response
curves: its paired metric evaluator returns exactly ``profile(param)`` when
given stub output, and the payload length is a declared function of the
parameter so CR/bpp are deterministic too. The parameter value travels to
the metric inside the first eight decoded samples (the IEEE-754 bytes of
the value), so the evaluator stays a pure function of its two images.
"""

from __future__ import annotations

import math
import struct
from typing import Callable

import numpy as np

from .codec import Codec, CodecDescriptor, CodecError
from .container import CompressedBlob
from .image import RasterImage
from .metrics import DB_CAP, MetricDescriptor, MetricUnits
from .params import ControlParameter, ParameterRange, ParamKind, QualityDirection

__all__ = ["StubCodec"]

_PROFILE_GRID = 257


class StubCodec(Codec):
    def __init__(
        self,
        profile: Callable[[float], float],
        param_range: ParameterRange,
        payload_length: Callable[[float], int] | None = None,
        metric_id: str = "stub",
        metric_units: MetricUnits = MetricUnits.DECIBELS,
        codec_id: str = "stub",
    ):
        direction = (
            QualityDirection.INCREASES
            if param_range.kind is ParamKind.BITS_PER_PIXEL
            else QualityDirection.DECREASES
        )
        self._descriptor = CodecDescriptor(
            codec_id=codec_id,
            param_kind=param_range.kind,
            default_range=param_range,
            quality_direction=direction,
        )
        self.profile = profile
        self.payload_length = payload_length
        self._metric_id = metric_id
        self._metric_units = metric_units
        self._verify_monotone(param_range, direction)

    def _verify_monotone(self, prange: ParameterRange, direction: QualityDirection) -> None:
        grid = np.linspace(prange.min, prange.max, _PROFILE_GRID)
        values = np.array([self.profile(p) for p in grid])
        diffs = np.diff(values)
        sign = -1.0 if direction is QualityDirection.DECREASES else 1.0
        if not np.all(sign * diffs > 0):
            raise ValueError(
                f"profile must be strictly monotone ({direction.value}) over "
                f"[{prange.min}, {prange.max}]"
            )

    @property
    def descriptor(self) -> CodecDescriptor:
        return self._descriptor

    def _check_domain(self, value: float) -> None:
        r = self._descriptor.default_range
        if not r.min <= value <= r.max:
            raise CodecError(f"parameter {value} outside stub domain [{r.min}, {r.max}]")

    def profile_at(self, value: float) -> float:
        self._check_domain(value)
        return float(self.profile(value))

    def compress(self, image: RasterImage, param: ControlParameter) -> CompressedBlob:
        self._check_param(param)
        self._check_domain(param.value)
        if self.payload_length is not None:
            size = int(self.payload_length(param.value))
        else:
            size = math.ceil(image.raw_byte_size / param.value)
        size = max(size, 8)
        payload = struct.pack("<d", param.value).ljust(size, b"\0")
        return CompressedBlob(
            codec_id=self._descriptor.codec_id,
            param=param,
            width=image.width,
            height=image.height,
            bit_depth=image.bit_depth,
            backend_id="stub",
            payload=payload,
        )

    def decompress(self, blob: CompressedBlob) -> RasterImage:
        if blob.codec_id != self._descriptor.codec_id:
            raise CodecError(f"blob was written by {blob.codec_id!r}, not the stub")
        if len(blob.payload) < 8:
            raise CodecError("corrupt stub payload")
        samples = np.zeros((blob.height, blob.width), dtype=np.uint16)
        flat = samples.ravel()
        if flat.shape[0] < 8:
            raise CodecError("stub image too small to carry the parameter")
        flat[:8] = np.frombuffer(blob.payload[:8], dtype=np.uint8)
        dtype = np.uint8 if blob.bit_depth == 8 else np.uint16
        return RasterImage(samples.astype(dtype), blob.bit_depth)

    def metric(self) -> tuple[MetricDescriptor, Callable[[RasterImage, RasterImage], float]]:
        """Descriptor/evaluator pair returning exactly profile(param)."""
        if self._metric_units is MetricUnits.DECIBELS:
            desc = MetricDescriptor(self._metric_id, self._metric_units, 0.0, DB_CAP)
        else:
            desc = MetricDescriptor(self._metric_id, self._metric_units, 0.0, 1.0)

        def evaluate(ref: RasterImage, dist: RasterImage) -> float:
            raw = dist.samples.ravel()[:8].astype(np.uint8).tobytes()
            (value,) = struct.unpack("<d", raw)
            return self.profile_at(value)

        return desc, evaluate
