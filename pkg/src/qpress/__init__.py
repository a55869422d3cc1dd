"""qpress: compress images to a preset quality-metric value.

The toolkit drives a codec's scalar control parameter (quantization step,
scaling factor or bpp) with iterative search until a chosen full-reference
metric (PSNR, SSIM, MS-SSIM, WSNR, PSNR-HVS, PSNR-HVS-M) hits a target
value within a preset tolerance. Single images, hyperspectral cubes
(band by band), a CLI, and a small job service for the web console.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .codec import (
    BlockDctCodec,
    Codec,
    CodecDescriptor,
    CodecError,
    available_codecs,
    decompress_with_registry,
    get_codec,
    register_codec,
)
from .container import CompressedBlob, ContainerError
from .cube import (
    BandOutcome,
    CubeBandError,
    CubeResult,
    HomomorphicTransform,
    compress_cube,
    fit_homomorphic,
)
from .external import AdapterConfigError, ExternalCodec
from .image import (
    ImageFormatError,
    RasterImage,
    RawDescriptor,
    SpectralCube,
    bits_per_pixel,
    compression_ratio,
    cube_to_raw,
    format_raw_descriptor,
    load_pgm,
    parse_raw_descriptor,
    raw_to_cube,
    store_pgm,
)
from .metrics import (
    DB_CAP,
    MetricDescriptor,
    MetricError,
    MetricUnits,
    MetricValue,
    available_metrics,
    metric_registry,
    msssim,
    psnr,
    psnr_hvs,
    psnr_hvs_m,
    register_metric,
    ssim,
    wsnr,
)
from .params import ControlParameter, ParameterRange, ParamKind, QualityDirection
from .search import (
    InfeasibleTargetError,
    MetricSpan,
    Probe,
    QualityTarget,
    SearchError,
    SearchResult,
    SearchStatus,
    bisection_search,
    estimate_range,
    interpolation_search,
    run_with_report,
)
from .stub import StubCodec

__version__ = "0.1.0"
