"""Iterative control-parameter search for a preset metric value.

Two procedures drive a codec to a target quality within tolerance:

  * bisection_search      interval halving on the parameter range;
  * interpolation_search  starts from a recommended parameter value and
                          refines by secant steps (linear interpolation on
                          the last two probes), falling back to a halving
                          step when interpolation leaves the bracket twice
                          in a row.

Both verify feasibility first by compressing at the range endpoints; those
two probes are reported separately from the headline iteration count, which
counts only search-phase compress/decompress/measure cycles.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Callable

from .codec import Codec
from .container import CompressedBlob
from .image import RasterImage, bits_per_pixel, compression_ratio
from .metrics import MetricDescriptor, MetricValue, metric_registry
from .params import ControlParameter, ParameterRange, QualityDirection, kinds_compatible

__all__ = [
    "QualityTarget",
    "SearchStatus",
    "Probe",
    "MetricSpan",
    "SearchResult",
    "SearchError",
    "InfeasibleTargetError",
    "estimate_range",
    "bisection_search",
    "interpolation_search",
    "run_with_report",
    "result_to_report",
    "REPORT_SCHEMA",
]

REPORT_SCHEMA = "qpress-report/1"

# below this fraction of the range width further halving is meaningless
# against codec rounding
RESOLUTION_FRACTION = 1e-3

DEFAULT_INTERP_MAX_ITERS = 10


class SearchError(ValueError):
    pass


class InfeasibleTargetError(SearchError):
    """Target lies outside the metric span achievable on the range."""

    def __init__(self, target: float, span: "MetricSpan"):
        self.target = target
        self.span = span
        lo, hi = span.achievable_interval
        super().__init__(
            f"target {target:g} is outside the achievable interval "
            f"[{lo:.4f}, {hi:.4f}] for this image/codec/range"
        )


@dataclass(frozen=True, slots=True)
class QualityTarget:
    metric_id: str
    target_value: float
    tolerance: float

    def __post_init__(self):
        object.__setattr__(self, "target_value", float(self.target_value))
        object.__setattr__(self, "tolerance", float(self.tolerance))
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")


class SearchStatus(str, enum.Enum):
    CONVERGED = "converged"
    EXHAUSTED_RESOLUTION = "exhausted_resolution"
    CLAMPED_TO_MIN_PARAM = "clamped_to_min_param"
    CLAMPED_TO_MAX_PARAM = "clamped_to_max_param"


@dataclass(frozen=True, slots=True)
class Probe:
    param: float
    value: float


@dataclass(frozen=True, slots=True)
class MetricSpan:
    value_at_param_min: MetricValue
    value_at_param_max: MetricValue
    params: ParameterRange

    @property
    def achievable_interval(self) -> tuple[float, float]:
        a = self.value_at_param_min.value
        b = self.value_at_param_max.value
        return (min(a, b), max(a, b))

    def contains(self, value: float) -> bool:
        lo, hi = self.achievable_interval
        return lo <= value <= hi


@dataclass(frozen=True, slots=True)
class SearchResult:
    status: SearchStatus
    achieved_value: MetricValue
    final_param: ControlParameter
    iterations: int
    history: tuple[Probe, ...]
    span: MetricSpan
    cr: float
    bpp: float
    blob: CompressedBlob

    def __post_init__(self):
        if self.iterations != len(self.history):
            raise ValueError("iterations must equal the number of search probes")


MeasureFn = Callable[[RasterImage], float]
ProbeCallback = Callable[[str, float, float], None]


def _resolve_metric(metric) -> tuple[MetricDescriptor, Callable]:
    if isinstance(metric, str):
        return metric_registry(metric)
    desc, fn = metric
    return desc, fn


def _check_target(desc: MetricDescriptor, target: QualityTarget) -> None:
    if target.metric_id != desc.metric_id:
        raise SearchError(
            f"target names metric {target.metric_id!r} but evaluator is {desc.metric_id!r}"
        )
    if not desc.contains(target.target_value):
        raise SearchError(
            f"target {target.target_value:g} outside the declared range "
            f"[{desc.lo:g}, {desc.hi:g}] of {desc.metric_id}"
        )


class _Prober:
    """Runs compress -> decompress -> measure cycles and keeps the best blob."""

    def __init__(
        self,
        image: RasterImage,
        codec: Codec,
        evaluate: MeasureFn,
        prange: ParameterRange,
        on_probe: ProbeCallback | None,
    ):
        self.image = image
        self.codec = codec
        self.evaluate = evaluate
        self.prange = prange
        self.on_probe = on_probe
        self.history: list[Probe] = []

    def run(self, value: float, phase: str) -> tuple[float, CompressedBlob]:
        param = ControlParameter(self.prange.kind, value)
        blob = self.codec.compress(self.image, param)
        decoded = self.codec.decompress(blob)
        metric_value = float(self.evaluate(decoded))
        if phase == "search":
            self.history.append(Probe(value, metric_value))
        if self.on_probe is not None:
            self.on_probe(phase, value, metric_value)
        return metric_value, blob


def _make_prober(
    image: RasterImage,
    codec: Codec,
    metric,
    prange: ParameterRange,
    measure: MeasureFn | None,
    on_probe: ProbeCallback | None,
) -> tuple[_Prober, MetricDescriptor]:
    desc, evaluator = _resolve_metric(metric)
    if not kinds_compatible(codec.descriptor.param_kind, prange.kind):
        raise SearchError(
            f"range kind {prange.kind.value} does not match codec parameter kind "
            f"{codec.descriptor.param_kind.value}"
        )
    if measure is None:
        evaluate = lambda decoded: evaluator(image, decoded)  # noqa: E731
    else:
        evaluate = measure
    return _Prober(image, codec, evaluate, prange, on_probe), desc


def estimate_range(
    image: RasterImage,
    codec: Codec,
    metric,
    prange: ParameterRange | None = None,
    measure: MeasureFn | None = None,
    on_probe: ProbeCallback | None = None,
) -> MetricSpan:
    """Metric values at both ends of the parameter range; exactly two probes."""
    if prange is None:
        prange = codec.descriptor.default_range
    prober, desc = _make_prober(image, codec, metric, prange, measure, on_probe)
    v_min, _ = prober.run(prange.min, "endpoint")
    v_max, _ = prober.run(prange.max, "endpoint")
    return MetricSpan(
        MetricValue(desc.metric_id, v_min), MetricValue(desc.metric_id, v_max), prange
    )


def _span_via(prober: _Prober, desc: MetricDescriptor, prange: ParameterRange):
    v_min, blob_min = prober.run(prange.min, "endpoint")
    v_max, blob_max = prober.run(prange.max, "endpoint")
    span = MetricSpan(
        MetricValue(desc.metric_id, v_min), MetricValue(desc.metric_id, v_max), prange
    )
    return span, (v_min, blob_min), (v_max, blob_max)


def _endpoint_result(
    prober: _Prober,
    desc: MetricDescriptor,
    span: MetricSpan,
    status: SearchStatus,
    param_value: float,
    value: float,
    blob: CompressedBlob,
) -> SearchResult:
    return SearchResult(
        status=status,
        achieved_value=MetricValue(desc.metric_id, value),
        final_param=ControlParameter(span.params.kind, param_value),
        iterations=0,
        history=(),
        span=span,
        cr=compression_ratio(prober.image, blob),
        bpp=bits_per_pixel(prober.image, blob),
        blob=blob,
    )


def _feasibility_gate(
    prober: _Prober,
    desc: MetricDescriptor,
    target: QualityTarget,
    prange: ParameterRange,
    quality_direction: QualityDirection,
    clamp: bool,
):
    """Probe the endpoints; either pass through (returning the span) or
    finish early: converged at an endpoint, clamped, or infeasible."""
    span, (v_min, blob_min), (v_max, blob_max) = _span_via(prober, desc, prange)
    t = target.target_value
    if span.contains(t):
        return span, None
    # outside the span: an endpoint within tolerance still converges
    d_min = abs(v_min - t)
    d_max = abs(v_max - t)
    if min(d_min, d_max) <= target.tolerance:
        if d_min <= d_max:
            res = _endpoint_result(
                prober, desc, span, SearchStatus.CONVERGED, prange.min, v_min, blob_min
            )
        else:
            res = _endpoint_result(
                prober, desc, span, SearchStatus.CONVERGED, prange.max, v_max, blob_max
            )
        return span, res
    if not clamp:
        raise InfeasibleTargetError(t, span)
    # clamp to the endpoint on the target's side of the span
    hi_is_min = v_min >= v_max  # which param end delivers the higher quality
    if t > max(v_min, v_max):
        pick_min = hi_is_min
    else:
        pick_min = not hi_is_min
    if pick_min:
        res = _endpoint_result(
            prober, desc, span, SearchStatus.CLAMPED_TO_MIN_PARAM, prange.min, v_min, blob_min
        )
    else:
        res = _endpoint_result(
            prober, desc, span, SearchStatus.CLAMPED_TO_MAX_PARAM, prange.max, v_max, blob_max
        )
    return span, res


def _recommended_start(span: MetricSpan, target: float, prange: ParameterRange) -> float:
    """Recommended first probe: interpolate the target between the endpoint
    values on a logarithmic parameter axis (quality responds roughly
    log-linearly to the step on transform coders). Falls back to the
    geometric midpoint when the span is flat."""
    v_lo = span.value_at_param_min.value
    v_hi = span.value_at_param_max.value
    if v_lo != v_hi and min(v_lo, v_hi) < target < max(v_lo, v_hi):
        frac = (target - v_lo) / (v_hi - v_lo)
        ln_lo = math.log(prange.min)
        ln_hi = math.log(prange.max)
        return math.exp(ln_lo + frac * (ln_hi - ln_lo))
    return math.sqrt(prange.min * prange.max)


class _Best:
    """Best-so-far probe by distance to the target."""

    def __init__(self, target: float):
        self.target = target
        self.dist = math.inf
        self.param = None
        self.value = None
        self.blob = None

    def offer(self, param: float, value: float, blob: CompressedBlob) -> None:
        d = abs(value - self.target)
        if d < self.dist:
            self.dist = d
            self.param = param
            self.value = value
            self.blob = blob


def _finish(
    prober: _Prober,
    desc: MetricDescriptor,
    span: MetricSpan,
    status: SearchStatus,
    best: _Best,
) -> SearchResult:
    return SearchResult(
        status=status,
        achieved_value=MetricValue(desc.metric_id, best.value),
        final_param=ControlParameter(span.params.kind, best.param),
        iterations=len(prober.history),
        history=tuple(prober.history),
        span=span,
        cr=compression_ratio(prober.image, best.blob),
        bpp=bits_per_pixel(prober.image, best.blob),
        blob=best.blob,
    )


def bisection_search(
    image: RasterImage,
    codec: Codec,
    metric,
    target: QualityTarget,
    prange: ParameterRange | None = None,
    max_iters: int | None = None,
    clamp: bool = False,
    measure: MeasureFn | None = None,
    on_probe: ProbeCallback | None = None,
) -> SearchResult:
    """Interval halving on the parameter range until the metric is within
    tolerance or the bracket shrinks below the parameter resolution."""
    if prange is None:
        prange = codec.descriptor.default_range
    prober, desc = _make_prober(image, codec, metric, prange, measure, on_probe)
    _check_target(desc, target)
    eps_p = RESOLUTION_FRACTION * prange.width
    if max_iters is None:
        max_iters = math.ceil(math.log2(prange.width / eps_p)) + 2
    if max_iters < 1:
        raise SearchError("max_iters must be at least 1")

    direction = codec.descriptor.quality_direction
    span, early = _feasibility_gate(prober, desc, target, prange, direction, clamp)
    if early is not None:
        return early

    # orient so quality is non-increasing from lo to hi
    quality_drops_with_param = direction is QualityDirection.DECREASES
    lo, hi = prange.min, prange.max
    best = _Best(target.target_value)
    while len(prober.history) < max_iters:
        if abs(hi - lo) < eps_p:
            break
        mid = 0.5 * (lo + hi)
        value, blob = prober.run(mid, "search")
        best.offer(mid, value, blob)
        if abs(value - target.target_value) <= target.tolerance:
            return _finish(prober, desc, span, SearchStatus.CONVERGED, best)
        quality_too_high = value > target.target_value
        if quality_too_high == quality_drops_with_param:
            lo = mid
        else:
            hi = mid
    return _finish(prober, desc, span, SearchStatus.EXHAUSTED_RESOLUTION, best)


def interpolation_search(
    image: RasterImage,
    codec: Codec,
    metric,
    target: QualityTarget,
    prange: ParameterRange | None = None,
    seed: ControlParameter | float | None = None,
    max_iters: int = DEFAULT_INTERP_MAX_ITERS,
    clamp: bool = False,
    measure: MeasureFn | None = None,
    on_probe: ProbeCallback | None = None,
) -> SearchResult:
    """Seeded secant search: first probe at the recommended parameter
    (derived from the endpoint span on the log parameter axis unless given),
    second probe stepping toward the target, then linear interpolation
    through the last two probes, each candidate clamped into the current
    bracket."""
    if prange is None:
        prange = codec.descriptor.default_range
    prober, desc = _make_prober(image, codec, metric, prange, measure, on_probe)
    _check_target(desc, target)
    if max_iters < 1:
        raise SearchError("max_iters must be at least 1")
    eps_p = RESOLUTION_FRACTION * prange.width

    direction = codec.descriptor.quality_direction
    span, early = _feasibility_gate(prober, desc, target, prange, direction, clamp)
    if early is not None:
        return early

    if seed is None:
        seed_value = _recommended_start(span, target.target_value, prange)
    elif isinstance(seed, ControlParameter):
        seed_value = seed.value
    else:
        seed_value = float(seed)
    seed_value = prange.clamp(seed_value)

    quality_drops_with_param = direction is QualityDirection.DECREASES
    t = target.target_value
    best = _Best(t)
    plo, phi = prange.min, prange.max  # bracket known to contain the crossing

    def update_bracket(p: float, v: float) -> None:
        nonlocal plo, phi
        quality_too_high = v > t
        # move the bracket edge the crossing cannot be on
        if quality_too_high == quality_drops_with_param:
            plo = max(plo, p)
        else:
            phi = min(phi, p)

    p_prev = None
    v_prev = None
    p_cur = seed_value
    outside_streak = 0
    while True:
        value, blob = prober.run(p_cur, "search")
        best.offer(p_cur, value, blob)
        if abs(value - t) <= target.tolerance:
            return _finish(prober, desc, span, SearchStatus.CONVERGED, best)
        update_bracket(p_cur, value)
        if len(prober.history) >= max_iters:
            return _finish(prober, desc, span, SearchStatus.EXHAUSTED_RESOLUTION, best)
        if abs(phi - plo) < eps_p:
            return _finish(prober, desc, span, SearchStatus.EXHAUSTED_RESOLUTION, best)

        if p_prev is None:
            # bracketing step toward the target: interpolate on the log
            # parameter axis between this probe and the span endpoint on the
            # target's far side, falling back to a geometric step
            v_lo = span.value_at_param_min.value
            v_hi = span.value_at_param_max.value
            if value > t:
                pe, ve = (prange.min, v_lo) if v_lo < v_hi else (prange.max, v_hi)
            else:
                pe, ve = (prange.min, v_lo) if v_lo > v_hi else (prange.max, v_hi)
            cand = None
            if ve != value:
                ln_cand = math.log(p_cur) + (t - value) * (
                    math.log(pe) - math.log(p_cur)
                ) / (ve - value)
                cand = math.exp(ln_cand)
            if cand is None or not (plo < cand < phi):
                quality_too_high = value > t
                toward_max = quality_too_high == quality_drops_with_param
                edge = prange.max if toward_max else prange.min
                cand = math.sqrt(p_cur * edge)
        elif value == v_prev or (
            (value - v_prev) * (p_cur - p_prev) < 0
        ) != quality_drops_with_param:
            # flat or wrong-signed local slope: the secant line carries no
            # positional information, so take the halving step
            cand = 0.5 * (plo + phi)
            outside_streak = 0
        else:
            cand = p_cur + (t - value) * (p_cur - p_prev) / (value - v_prev)
            if plo < cand < phi:
                outside_streak = 0
            else:
                outside_streak += 1
                if outside_streak >= 2:
                    cand = 0.5 * (plo + phi)
                    outside_streak = 0
                else:
                    # project into the bracket interior; landing exactly on
                    # an edge would re-probe a known point
                    inset = 0.05 * (phi - plo)
                    cand = plo + inset if cand <= plo else phi - inset
        if cand == p_cur:
            cand = 0.5 * (plo + phi)
        p_prev, v_prev = p_cur, value
        p_cur = cand


def result_to_report(
    result: SearchResult,
    image: RasterImage,
    codec: Codec,
    target: QualityTarget,
    method: str,
) -> dict:
    """Structured report of one run; shared wire schema with the service."""
    span = result.span
    lo, hi = span.achievable_interval
    return {
        "schema": REPORT_SCHEMA,
        "codec_id": codec.descriptor.codec_id,
        "metric_id": result.achieved_value.metric_id,
        "target": target.target_value,
        "delta": target.tolerance,
        "method": method,
        "status": result.status.value,
        "achieved": result.achieved_value.value,
        "final_param": {
            "kind": result.final_param.kind.value,
            "value": result.final_param.value,
        },
        "iterations": result.iterations,
        "history": [{"param": p.param, "value": p.value} for p in result.history],
        "endpoint_probes": [
            {"param": span.params.min, "value": span.value_at_param_min.value},
            {"param": span.params.max, "value": span.value_at_param_max.value},
        ],
        "achievable_interval": [lo, hi],
        "cr": result.cr,
        "bpp": result.bpp,
        "width": image.width,
        "height": image.height,
        "bit_depth": image.bit_depth,
    }


def infeasible_report(
    error: InfeasibleTargetError,
    image: RasterImage,
    codec: Codec,
    target: QualityTarget,
    method: str,
) -> dict:
    lo, hi = error.span.achievable_interval
    return {
        "schema": REPORT_SCHEMA,
        "codec_id": codec.descriptor.codec_id,
        "metric_id": target.metric_id,
        "target": target.target_value,
        "delta": target.tolerance,
        "method": method,
        "status": "infeasible",
        "achievable_interval": [lo, hi],
        "endpoint_probes": [
            {"param": error.span.params.min, "value": error.span.value_at_param_min.value},
            {"param": error.span.params.max, "value": error.span.value_at_param_max.value},
        ],
        "width": image.width,
        "height": image.height,
        "bit_depth": image.bit_depth,
    }


def run_with_report(
    image: RasterImage,
    codec: Codec,
    metric,
    target: QualityTarget,
    prange: ParameterRange | None = None,
    method: str = "interp",
    seed: ControlParameter | float | None = None,
    max_iters: int | None = None,
    clamp: bool = False,
    measure: MeasureFn | None = None,
    on_probe: ProbeCallback | None = None,
) -> tuple[SearchResult, dict]:
    """Run the chosen search method and emit the machine-readable report."""
    if method == "bisect":
        result = bisection_search(
            image, codec, metric, target, prange,
            max_iters=max_iters, clamp=clamp, measure=measure, on_probe=on_probe,
        )
    elif method == "interp":
        result = interpolation_search(
            image, codec, metric, target, prange, seed=seed,
            max_iters=max_iters if max_iters is not None else DEFAULT_INTERP_MAX_ITERS,
            clamp=clamp, measure=measure, on_probe=on_probe,
        )
    else:
        raise SearchError(f"unknown method {method!r}; expected 'bisect' or 'interp'")
    report = result_to_report(result, image, codec, target, method)
    # reports must survive serialization bit-exactly
    assert json.loads(json.dumps(report)) == report
    return result, report
