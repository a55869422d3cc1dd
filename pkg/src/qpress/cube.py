"""Component-wise (sub-band by sub-band) compression of spectral cubes.

Each band is searched to the target independently; bands may run
concurrently. An optional homomorphic transform equalizes per-band dynamic
range before compression; quality is always targeted and verified in the
original sample domain (the metric sees the inverse-transformed decode), so
the reported value describes the image actually delivered.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .codec import Codec
from .image import RasterImage, SpectralCube
from .metrics import MetricError
from .params import ParameterRange
from .search import (
    InfeasibleTargetError,
    QualityTarget,
    SearchError,
    SearchResult,
    _resolve_metric,
    bisection_search,
    interpolation_search,
)

__all__ = [
    "HomomorphicTransform",
    "fit_homomorphic",
    "CubeResult",
    "BandOutcome",
    "CubeBandError",
    "compress_cube",
]


@dataclass(frozen=True, slots=True)
class HomomorphicTransform:
    """Pointwise y = round(scale * ln(1 + x)) with inverse
    x = round(exp(y / scale) - 1), clamped to [0, input_max]."""

    scale: float
    input_max: float
    kind: str = "log1p_scaled"

    def __post_init__(self):
        if self.kind != "log1p_scaled":
            raise ValueError(f"unknown transform kind {self.kind!r}")
        if not self.scale > 0 or not self.input_max > 0:
            raise ValueError("scale and input_max must be positive")

    def forward(self, band: RasterImage) -> RasterImage:
        x = band.as_float()
        if x.max() > self.input_max:
            raise ValueError(
                f"sample {x.max():.0f} exceeds the transform's input_max {self.input_max:.0f}"
            )
        y = np.rint(self.scale * np.log1p(x))
        if y.max() > band.peak:
            raise ValueError("transform output exceeds the band's bit depth")
        dtype = np.uint8 if band.bit_depth == 8 else np.uint16
        return RasterImage(y.astype(dtype), band.bit_depth)

    def inverse(self, band: RasterImage) -> RasterImage:
        y = band.as_float()
        x = np.rint(np.expm1(y / self.scale))
        x = np.clip(x, 0.0, self.input_max)
        dtype = np.uint8 if band.bit_depth == 8 else np.uint16
        return RasterImage(x.astype(dtype), band.bit_depth)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "scale": self.scale, "input_max": self.input_max}

    @classmethod
    def from_dict(cls, d: dict) -> "HomomorphicTransform":
        return cls(scale=d["scale"], input_max=d["input_max"], kind=d.get("kind", "log1p_scaled"))


def fit_homomorphic(band: RasterImage, input_max: float | None = None) -> HomomorphicTransform | None:
    """Fit the scale so input_max maps to the band's full-scale value.

    Returns None for degenerate bands (max sample < 1), which have no range
    to expand. The round trip is exact to within one gray level only while
    the forward map keeps unit resolution, i.e. for input_max well below
    full scale (about 19992 at 16 bits, 161 at 8 bits); fitting a
    full-range band is allowed but lossy at the top of the range.
    """
    if input_max is None:
        input_max = float(band.samples.max())
    if input_max < 1.0:
        return None
    scale = float(band.peak) / math.log1p(input_max)
    return HomomorphicTransform(scale=scale, input_max=float(input_max))


@dataclass(frozen=True, slots=True)
class BandOutcome:
    index: int
    result: SearchResult
    transform: HomomorphicTransform | None


@dataclass(frozen=True, slots=True)
class CubeResult:
    per_band: tuple[BandOutcome, ...]
    aggregate_cr: float
    total_iterations: int

    @property
    def mean_iterations(self) -> float:
        return self.total_iterations / len(self.per_band)


class CubeBandError(SearchError):
    """A band failed; successfully finished bands ride along for inspection."""

    def __init__(self, band_index: int, cause: Exception, partial: list[BandOutcome]):
        self.band_index = band_index
        self.cause = cause
        self.partial = tuple(partial)
        super().__init__(f"band {band_index} failed: {cause}")


def _search_one_band(
    index: int,
    band: RasterImage,
    codec: Codec,
    metric,
    target: QualityTarget,
    prange: ParameterRange | None,
    method: str,
    use_homomorphic: bool,
    clamp: bool,
    max_iters: int | None,
    on_probe=None,
) -> BandOutcome:
    transform = fit_homomorphic(band) if use_homomorphic else None
    if transform is None:
        work_image = band
        measure = None
    else:
        work_image = transform.forward(band)
        _, evaluator = _resolve_metric(metric)

        def measure(decoded: RasterImage) -> float:
            return evaluator(band, transform.inverse(decoded))

    kwargs = dict(clamp=clamp, measure=measure, on_probe=on_probe)
    if method == "bisect":
        result = bisection_search(
            work_image, codec, metric, target, prange, max_iters=max_iters, **kwargs
        )
    elif method == "interp":
        result = interpolation_search(
            work_image, codec, metric, target, prange,
            max_iters=max_iters if max_iters is not None else 10, **kwargs,
        )
    else:
        raise SearchError(f"unknown method {method!r}")
    return BandOutcome(index, result, transform)


def compress_cube(
    cube: SpectralCube,
    codec: Codec,
    metric,
    target: QualityTarget,
    prange: ParameterRange | None = None,
    method: str = "interp",
    use_homomorphic: bool = False,
    clamp: bool = False,
    max_iters: int | None = None,
    max_workers: int = 1,
    on_band_probe=None,
) -> CubeResult:
    """Search every band to the target; any band failure aborts with the
    finished bands attached to the error. Results are ordered by band index
    regardless of worker scheduling."""

    def runner(i: int) -> BandOutcome:
        probe_cb = None
        if on_band_probe is not None:
            probe_cb = lambda phase, p, v, _i=i: on_band_probe(_i, phase, p, v)  # noqa: E731
        return _search_one_band(
            i, cube.bands[i], codec, metric, target, prange, method,
            use_homomorphic, clamp, max_iters, probe_cb,
        )

    outcomes: list[BandOutcome | None] = [None] * len(cube)
    if max_workers <= 1:
        for i in range(len(cube)):
            try:
                outcomes[i] = runner(i)
            except (SearchError, MetricError, InfeasibleTargetError) as e:
                done = [o for o in outcomes if o is not None]
                raise CubeBandError(i, e, done) from e
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = {i: pool.submit(runner, i) for i in range(len(cube))}
            first_failure: tuple[int, Exception] | None = None
            for i in range(len(cube)):
                try:
                    outcomes[i] = futures[i].result()
                except (SearchError, MetricError, InfeasibleTargetError) as e:
                    if first_failure is None:
                        first_failure = (i, e)
            if first_failure is not None:
                done = [o for o in outcomes if o is not None]
                raise CubeBandError(first_failure[0], first_failure[1], done)

    finished = [o for o in outcomes if o is not None]
    raw_total = sum(cube.bands[o.index].raw_byte_size for o in finished)
    payload_total = sum(len(o.result.blob.payload) for o in finished)
    return CubeResult(
        per_band=tuple(finished),
        aggregate_cr=raw_total / payload_total,
        total_iterations=sum(o.result.iterations for o in finished),
    )
