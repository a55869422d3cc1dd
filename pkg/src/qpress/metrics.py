"""Full-reference quality metrics: PSNR, SSIM, MS-SSIM, WSNR, PSNR-HVS(-M).

All six share one registry keyed by metric id. dB-valued metrics are capped
at 100.0 (a finite sentinel for the zero-error case keeps search arithmetic
total); SSIM-family values are unitless with nominal range [0, 1].

Conventions follow the public reference implementations of the metric
authors: SSIM/MS-SSIM use the 11x11 Gaussian window (sigma 1.5, K1=0.01,
K2=0.03) and the standard five-scale exponents; WSNR weights the error
spectrum by the Mannos-Sakrison contrast sensitivity function with the
oblique-effect correction; the PSNR-HVS family uses the 8x8 DCT CSF and
contrast-masking tables from tables.py. HVS-family metrics evaluate 16-bit
input in the 0..255 domain the tables are defined for (samples are scaled
by 255/peak); PSNR and SSIM use the native dynamic range.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.ndimage import convolve1d

from . import _kernels as K
from .image import RasterImage
from .tables import CSF_COEFFS, MASK_COEFFS, dct_matrix

__all__ = [
    "DB_CAP",
    "MetricUnits",
    "MetricDescriptor",
    "MetricValue",
    "MetricError",
    "psnr",
    "ssim",
    "msssim",
    "wsnr",
    "psnr_hvs",
    "psnr_hvs_m",
    "metric_registry",
    "register_metric",
    "available_metrics",
]

DB_CAP = 100.0

_DCT8 = dct_matrix(8)
_DCT8_T = np.ascontiguousarray(_DCT8.T)


class MetricError(ValueError):
    """Incompatible operands or unknown metric id."""


class MetricUnits(str, enum.Enum):
    DECIBELS = "decibels"
    UNITLESS = "unitless"


@dataclass(frozen=True, slots=True)
class MetricDescriptor:
    metric_id: str
    units: MetricUnits
    lo: float
    hi: float
    higher_is_better: bool = True

    @property
    def default_tolerance(self) -> float:
        return 0.1 if self.units is MetricUnits.DECIBELS else 0.005

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi


@dataclass(frozen=True, slots=True)
class MetricValue:
    metric_id: str
    value: float


def _check_pair(ref: RasterImage, dist: RasterImage, min_side: int = 1) -> None:
    if (ref.width, ref.height) != (dist.width, dist.height):
        raise MetricError(
            f"dimension mismatch: {ref.width}x{ref.height} vs {dist.width}x{dist.height}"
        )
    if ref.bit_depth != dist.bit_depth:
        raise MetricError(f"bit depth mismatch: {ref.bit_depth} vs {dist.bit_depth}")
    if min(ref.width, ref.height) < min_side:
        raise MetricError(f"image smaller than {min_side}x{min_side}")


def _db(peak_sq_over_mse: float) -> float:
    return min(DB_CAP, 10.0 * np.log10(peak_sq_over_mse))


# ---------------------------------------------------------------------------
# PSNR

def _psnr(ref: RasterImage, dist: RasterImage) -> float:
    _check_pair(ref, dist)
    diff = ref.as_float() - dist.as_float()
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return DB_CAP
    return _db(float(ref.peak) ** 2 / mse)


# ---------------------------------------------------------------------------
# SSIM / MS-SSIM

_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03
MSSSIM_EXPONENTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)

_g = np.exp(-((np.arange(_SSIM_WINDOW) - (_SSIM_WINDOW - 1) / 2.0) ** 2) / (2 * _SSIM_SIGMA**2))
_GAUSS_1D = _g / _g.sum()


def _filter_valid(img: np.ndarray) -> np.ndarray:
    """Separable Gaussian filtering, 'valid' region only."""
    half = _SSIM_WINDOW // 2
    tmp = convolve1d(img, _GAUSS_1D, axis=1, mode="constant")
    out = convolve1d(tmp, _GAUSS_1D, axis=0, mode="constant")
    return out[half:-half, half:-half]


def _ssim_maps(a: np.ndarray, b: np.ndarray, peak: float) -> tuple[np.ndarray, np.ndarray]:
    """Luminance and contrast-structure maps over the valid window region."""
    c1 = (_SSIM_K1 * peak) ** 2
    c2 = (_SSIM_K2 * peak) ** 2
    mu_a = _filter_valid(a)
    mu_b = _filter_valid(b)
    var_a = _filter_valid(a * a) - mu_a * mu_a
    var_b = _filter_valid(b * b) - mu_b * mu_b
    cov = _filter_valid(a * b) - mu_a * mu_b
    lum = (2 * mu_a * mu_b + c1) / (mu_a * mu_a + mu_b * mu_b + c1)
    cs = (2 * cov + c2) / (var_a + var_b + c2)
    return lum, cs


def _ssim(ref: RasterImage, dist: RasterImage) -> float:
    _check_pair(ref, dist, min_side=_SSIM_WINDOW)
    lum, cs = _ssim_maps(ref.as_float(), dist.as_float(), float(ref.peak))
    return float(np.mean(lum * cs))


def _downsample2(img: np.ndarray) -> np.ndarray:
    """2x2 box filter (edge padded bottom/right) then subsample by two."""
    p = np.pad(img, ((0, 1), (0, 1)), mode="edge")
    avg = (p[:-1, :-1] + p[1:, :-1] + p[:-1, 1:] + p[1:, 1:]) / 4.0
    return avg[0::2, 0::2]


def _msssim(ref: RasterImage, dist: RasterImage) -> float:
    _check_pair(ref, dist, min_side=_SSIM_WINDOW)
    a = ref.as_float()
    b = dist.as_float()
    peak = float(ref.peak)
    # drop coarse scales that would shrink the image below the window
    levels = len(MSSSIM_EXPONENTS)
    while levels > 1 and min(a.shape) // (1 << (levels - 1)) < _SSIM_WINDOW:
        levels -= 1
    weights = np.array(MSSSIM_EXPONENTS[:levels])
    weights = weights / weights.sum()
    value = 1.0
    for scale in range(levels):
        lum, cs = _ssim_maps(a, b, peak)
        if scale == levels - 1:
            term = float(np.mean(lum * cs))
        else:
            term = float(np.mean(cs))
            a = _downsample2(a)
            b = _downsample2(b)
        # negative means are possible only on adversarial inputs; floor keeps
        # the fractional powers real
        value *= max(term, 0.0) ** weights[scale]
    return float(value)


# ---------------------------------------------------------------------------
# WSNR

_WSNR_NFREQ = 21.9  # cycles/degree at the sampling Nyquist
_WSNR_OBLIQUE = 0.7
_WSNR_PLATEAU_FREQ = 7.8909
_WSNR_PLATEAU_VALUE = 0.9809


def _wsnr_csf(rows: int, cols: int) -> np.ndarray:
    """Mannos-Sakrison CSF with oblique-effect correction on the centred grid."""
    x = np.arange(-cols / 2 + 0.5, cols / 2 + 0.5)
    y = np.arange(-rows / 2 + 0.5, rows / 2 + 0.5)
    xg, yg = np.meshgrid(x, y)
    # radial frequency in cycles/degree; the angular term squeezes diagonals
    radfreq = np.hypot(xg / cols, yg / rows) * 2.0 * _WSNR_NFREQ
    theta = np.arctan2(yg, xg)
    s = (1.0 - _WSNR_OBLIQUE) / 2.0 * np.cos(4.0 * theta) + (1.0 + _WSNR_OBLIQUE) / 2.0
    radfreq = radfreq / s
    csf = 2.6 * (0.0192 + 0.114 * radfreq) * np.exp(-((0.114 * radfreq) ** 1.1))
    csf[radfreq < _WSNR_PLATEAU_FREQ] = _WSNR_PLATEAU_VALUE
    return csf


def _wsnr(ref: RasterImage, dist: RasterImage) -> float:
    _check_pair(ref, dist)
    a = ref.as_float()
    err = a - dist.as_float()
    if not err.any():
        return DB_CAP
    csf = _wsnr_csf(*a.shape)
    err_wt = np.fft.fftshift(np.fft.fft2(err)) * csf
    signal = float((np.abs(np.fft.fft2(a)) ** 2).sum())
    noise = float((np.abs(err_wt) ** 2).sum())
    if noise == 0.0:
        return DB_CAP
    return _db(signal / noise)


# ---------------------------------------------------------------------------
# PSNR-HVS and PSNR-HVS-M

def _hvs_sums(ref: RasterImage, dist: RasterImage) -> tuple[float, float, int]:
    _check_pair(ref, dist, min_side=8)
    scale = 255.0 / float(ref.peak)
    a = ref.as_float() * scale
    b = dist.as_float() * scale
    return K.hvs_accumulate(a, b, _DCT8, _DCT8_T, CSF_COEFFS, MASK_COEFFS)


def _psnr_hvs(ref: RasterImage, dist: RasterImage) -> float:
    _, plain, count = _hvs_sums(ref, dist)
    s = plain / count
    if s == 0.0:
        return DB_CAP
    return _db(255.0**2 / s)


def _psnr_hvs_m(ref: RasterImage, dist: RasterImage) -> float:
    masked, _, count = _hvs_sums(ref, dist)
    s = masked / count
    if s == 0.0:
        return DB_CAP
    return _db(255.0**2 / s)


# ---------------------------------------------------------------------------
# Registry

Evaluator = Callable[[RasterImage, RasterImage], float]

_DB = MetricUnits.DECIBELS
_UL = MetricUnits.UNITLESS

_REGISTRY: dict[str, tuple[MetricDescriptor, Evaluator]] = {}


def register_metric(descriptor: MetricDescriptor, evaluator: Evaluator, replace: bool = False):
    if descriptor.metric_id in _REGISTRY and not replace:
        raise ValueError(f"metric {descriptor.metric_id!r} is already registered")
    _REGISTRY[descriptor.metric_id] = (descriptor, evaluator)


def metric_registry(metric_id: str) -> tuple[MetricDescriptor, Evaluator]:
    try:
        return _REGISTRY[metric_id]
    except KeyError:
        raise MetricError(
            f"unknown metric {metric_id!r}; available: {sorted(_REGISTRY)}"
        ) from None


def available_metrics() -> dict[str, MetricDescriptor]:
    return {mid: d for mid, (d, _) in sorted(_REGISTRY.items())}


for _mid, _units, _lo, _hi, _fn in (
    ("psnr", _DB, 0.0, DB_CAP, _psnr),
    ("ssim", _UL, -1.0, 1.0, _ssim),
    ("msssim", _UL, 0.0, 1.0, _msssim),
    ("wsnr", _DB, 0.0, DB_CAP, _wsnr),
    ("psnr_hvs", _DB, 0.0, DB_CAP, _psnr_hvs),
    ("psnr_hvs_m", _DB, 0.0, DB_CAP, _psnr_hvs_m),
):
    register_metric(MetricDescriptor(_mid, _units, _lo, _hi), _fn)


def _wrap(mid: str) -> Callable[[RasterImage, RasterImage], MetricValue]:
    _, fn = metric_registry(mid)

    def call(ref: RasterImage, dist: RasterImage) -> MetricValue:
        return MetricValue(mid, fn(ref, dist))

    call.__name__ = mid
    return call


psnr = _wrap("psnr")
ssim = _wrap("ssim")
msssim = _wrap("msssim")
wsnr = _wrap("wsnr")
psnr_hvs = _wrap("psnr_hvs")
psnr_hvs_m = _wrap("psnr_hvs_m")
