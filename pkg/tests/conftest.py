"""Shared corpus fixtures.

Natural images come from scikit-image's bundled photographs; synthetic ones
are generated deterministically. All corpus images are 512x512 8-bit. The
16-bit cube has ten bands with deliberately different dynamic ranges.
"""

from __future__ import annotations

import numpy as np
import pytest
import skimage.data

from qpress import RasterImage, SpectralCube


def _gray(arr: np.ndarray) -> np.ndarray:
    if arr.ndim == 3:
        arr = arr.astype(np.float64).mean(axis=2)
    return np.clip(np.rint(arr), 0, 255).astype(np.uint8)


def make_natural_corpus() -> dict[str, RasterImage]:
    return {
        "camera": RasterImage(_gray(skimage.data.camera()), 8),
        "moon": RasterImage(_gray(skimage.data.moon()), 8),
        "astronaut": RasterImage(_gray(skimage.data.astronaut()), 8),
    }


def make_synthetic_corpus() -> dict[str, RasterImage]:
    rng = np.random.default_rng(20240811)
    yy, xx = np.mgrid[0:512, 0:512]
    ramp = xx / 511.0 * 170.0 + 35.0 * np.sin(yy / 36.0) + 12.0 * np.sin((xx + yy) / 6.5) + 40.0
    ramp += rng.normal(0.0, 12.0, ramp.shape)
    coarse = rng.normal(0.0, 1.0, (32, 32))
    fine = np.kron(coarse, np.ones((16, 16)))
    # smooth the block edges a little so the texture is not pure squares
    blobs = 128.0 + 55.0 * (fine + np.roll(fine, 8, 0) + np.roll(fine, 8, 1)) / 3.0
    blobs += rng.normal(0.0, 4.0, blobs.shape)
    return {
        "ramp": RasterImage(np.clip(np.rint(ramp), 0, 255).astype(np.uint8), 8),
        "blobs": RasterImage(np.clip(np.rint(blobs), 0, 255).astype(np.uint8), 8),
    }


def make_cube16(bands: int = 10, height: int = 192, width: int = 256) -> SpectralCube:
    """Synthetic hyperspectral cube; per-band maxima spread over 3 octaves
    so the sub-band dynamic ranges differ considerably."""
    rng = np.random.default_rng(7321)
    maxima = np.linspace(6000.0, 48000.0, bands)
    yy, xx = np.mgrid[0:height, 0:width]
    out = []
    for k in range(bands):
        m = maxima[k]
        smooth = 0.30 * (1 + np.sin(xx / (24.0 + 3 * k) + k) * np.cos(yy / (31.0 + 2 * k)))
        mid = 0.18 * (1 + np.sin((xx + 0.6 * yy) / (5.5 + 0.4 * k) + 2 * k))
        base = (0.16 + smooth + mid) * m / 1.1
        noise = rng.normal(0.0, m / 6.0, base.shape)
        band = np.clip(np.rint(base + noise), 0, m)
        out.append(RasterImage(band.astype(np.uint16), 16))
    return SpectralCube(tuple(out), tuple(f"band{k}" for k in range(bands)))


@pytest.fixture(scope="session")
def natural_corpus() -> dict[str, RasterImage]:
    return make_natural_corpus()


@pytest.fixture(scope="session")
def synthetic_corpus() -> dict[str, RasterImage]:
    return make_synthetic_corpus()


@pytest.fixture(scope="session")
def corpus(natural_corpus, synthetic_corpus) -> dict[str, RasterImage]:
    return {**natural_corpus, **synthetic_corpus}


@pytest.fixture(scope="session")
def camera(natural_corpus) -> RasterImage:
    return natural_corpus["camera"]


@pytest.fixture(scope="session")
def cube16() -> SpectralCube:
    return make_cube16()


def add_noise(image: RasterImage, sigma: float, seed: int = 99) -> RasterImage:
    rng = np.random.default_rng(seed)
    noisy = image.as_float() + rng.normal(0.0, sigma, image.samples.shape)
    dtype = np.uint8 if image.bit_depth == 8 else np.uint16
    return RasterImage(np.clip(np.rint(noisy), 0, image.peak).astype(dtype), image.bit_depth)
