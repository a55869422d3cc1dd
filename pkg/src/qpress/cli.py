"""Command-line surface.

Subcommands mirror the tool's control blocks: ``compress`` (iterative
search to a target), ``estimate`` (metric span over the parameter range),
``cube`` (hyperspectral mode), ``measure`` (metric suite), plus single-shot
``encode``/``decode`` and ``serve`` for the job service.

Exit statuses: 0 success, 1 I/O or configuration error, 2 infeasible
target, 3 search exhausted resolution, 4 cube band failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .codec import CodecError, get_codec, register_codec
from .container import CompressedBlob, ContainerError
from .cube import CubeBandError, compress_cube
from .external import AdapterConfigError, ExternalCodec
from .image import (
    ImageFormatError,
    bits_per_pixel,
    compression_ratio,
    load_pgm,
    parse_raw_descriptor,
    raw_to_cube,
    store_pgm,
)
from .metrics import MetricError, available_metrics, metric_registry
from .params import ControlParameter, ParameterRange
from .search import (
    InfeasibleTargetError,
    QualityTarget,
    SearchError,
    SearchStatus,
    estimate_range,
    infeasible_report,
    result_to_report,
    run_with_report,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_EXHAUSTED = 3
EXIT_BAND_FAILED = 4


class CliError(Exception):
    """Validation/config/I-O failure; maps to exit status 1."""


def _read_file(path: str, what: str) -> bytes:
    p = Path(path)
    if not p.is_file():
        raise CliError(f"{what} not found: {path}")
    return p.read_bytes()


def _load_image(path: str):
    try:
        return load_pgm(_read_file(path, "input image"))
    except ImageFormatError as e:
        raise CliError(f"cannot parse {path}: {e}") from None


def _register_external(args) -> None:
    cfg_path = getattr(args, "external", None)
    if not cfg_path:
        return
    try:
        codec = ExternalCodec.from_config(_read_file(cfg_path, "adapter config").decode())
        register_codec(codec, replace=True)
    except (AdapterConfigError, UnicodeDecodeError) as e:
        raise CliError(f"bad adapter config {cfg_path}: {e}") from None


def _resolve_codec(codec_id: str):
    try:
        return get_codec(codec_id)
    except CodecError as e:
        raise CliError(str(e)) from None


def _resolve_metric_id(metric_id: str):
    try:
        return metric_registry(metric_id)
    except MetricError as e:
        raise CliError(str(e)) from None


def _build_target(args, desc) -> QualityTarget:
    delta = args.delta
    if delta is None:
        delta = desc.default_tolerance
    if delta <= 0:
        raise CliError(f"--delta must be positive, got {delta}")
    if not desc.contains(args.target):
        raise CliError(
            f"--target {args.target:g} outside the {desc.metric_id} range "
            f"[{desc.lo:g}, {desc.hi:g}]"
        )
    return QualityTarget(desc.metric_id, args.target, delta)


def _build_range(args, codec) -> ParameterRange:
    default = codec.descriptor.default_range
    lo = args.param_min if args.param_min is not None else default.min
    hi = args.param_max if args.param_max is not None else default.max
    try:
        return ParameterRange(default.kind, lo, hi)
    except ValueError as e:
        raise CliError(str(e)) from None


def _summary_line(report: dict) -> str:
    fields = [
        ("status", report["status"]),
        ("achieved", f"{report['achieved']:.4f}"),
        ("iterations", str(report["iterations"])),
        ("param", f"{report['final_param']['value']:.4f}"),
        ("cr", f"{report['cr']:.4f}"),
        ("bpp", f"{report['bpp']:.4f}"),
    ]
    return " ".join(f"{k}={v}" for k, v in fields)


def _write_json(path: str | None, payload: dict) -> None:
    if path:
        Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def cmd_compress(args) -> int:
    _register_external(args)
    image = _load_image(args.infile)
    codec = _resolve_codec(args.codec)
    desc, _ = _resolve_metric_id(args.metric)
    target = _build_target(args, desc)
    prange = _build_range(args, codec)
    try:
        result, report = run_with_report(
            image, codec, args.metric, target, prange,
            method=args.method, seed=args.seed, max_iters=args.max_iters, clamp=args.clamp,
        )
    except InfeasibleTargetError as e:
        report = infeasible_report(e, image, codec, target, args.method)
        _write_json(args.report, report)
        lo, hi = e.span.achievable_interval
        print(
            f"status=infeasible target={target.target_value:g} "
            f"achievable=[{lo:.4f}, {hi:.4f}]",
            file=sys.stderr,
        )
        return EXIT_INFEASIBLE
    Path(args.out).write_bytes(result.blob.to_bytes())
    if args.decoded_out:
        Path(args.decoded_out).write_bytes(store_pgm(codec.decompress(result.blob)))
    _write_json(args.report, report)
    print(_summary_line(report))
    if result.status is SearchStatus.EXHAUSTED_RESOLUTION:
        return EXIT_EXHAUSTED
    return EXIT_OK


def cmd_estimate(args) -> int:
    _register_external(args)
    image = _load_image(args.infile)
    codec = _resolve_codec(args.codec)
    _resolve_metric_id(args.metric)
    prange = _build_range(args, codec)
    span = estimate_range(image, codec, args.metric, prange)
    lo, hi = span.achievable_interval
    print(f"value_at_param_min={span.value_at_param_min.value:.4f} (param={prange.min:g})")
    print(f"value_at_param_max={span.value_at_param_max.value:.4f} (param={prange.max:g})")
    print(f"achievable_interval=[{lo:.4f}, {hi:.4f}]")
    _write_json(
        args.report,
        {
            "metric_id": args.metric,
            "codec_id": args.codec,
            "param_min": prange.min,
            "param_max": prange.max,
            "value_at_param_min": span.value_at_param_min.value,
            "value_at_param_max": span.value_at_param_max.value,
            "achievable_interval": [lo, hi],
        },
    )
    return EXIT_OK


def cmd_cube(args) -> int:
    _register_external(args)
    desc_text = _read_file(args.desc, "descriptor")
    try:
        raw_desc = parse_raw_descriptor(desc_text.decode())
        cube = raw_to_cube(_read_file(args.infile, "RAW input"), raw_desc)
    except (ImageFormatError, UnicodeDecodeError) as e:
        raise CliError(f"cannot load cube: {e}") from None
    codec = _resolve_codec(args.codec)
    mdesc, _ = _resolve_metric_id(args.metric)
    target = _build_target(args, mdesc)
    prange = _build_range(args, codec)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def manifest_entry(outcome):
        band_image = cube.bands[outcome.index]
        report = result_to_report(outcome.result, band_image, codec, target, args.method)
        return {
            "band": outcome.index,
            "blob": f"band_{outcome.index:03d}.qpb",
            "transform": outcome.transform.to_dict() if outcome.transform else None,
            "report": report,
        }

    try:
        result = compress_cube(
            cube, codec, args.metric, target, prange,
            method=args.method, use_homomorphic=args.homomorphic,
            clamp=args.clamp, max_workers=args.workers,
        )
    except CubeBandError as e:
        manifest = {
            "schema": "qpress-cube/1",
            "status": "failed",
            "failed_band": e.band_index,
            "error": str(e.cause),
            "bands": [manifest_entry(o) for o in e.partial],
        }
        (out_dir / "cube_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
        for o in e.partial:
            (out_dir / f"band_{o.index:03d}.qpb").write_bytes(o.result.blob.to_bytes())
        print(f"status=band_failed band={e.band_index} error: {e.cause}", file=sys.stderr)
        return EXIT_BAND_FAILED

    manifest = {
        "schema": "qpress-cube/1",
        "status": "ok",
        "width": cube.width,
        "height": cube.height,
        "bit_depth": cube.bit_depth,
        "aggregate_cr": result.aggregate_cr,
        "total_iterations": result.total_iterations,
        "bands": [manifest_entry(o) for o in result.per_band],
    }
    for o in result.per_band:
        (out_dir / f"band_{o.index:03d}.qpb").write_bytes(o.result.blob.to_bytes())
    (out_dir / "cube_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(
        f"status=ok bands={len(result.per_band)} aggregate_cr={result.aggregate_cr:.4f} "
        f"total_iterations={result.total_iterations}"
    )
    return EXIT_OK


def cmd_measure(args) -> int:
    ref = _load_image(args.ref)
    dist = _load_image(args.dist)
    ids = sorted(available_metrics()) if args.all else [args.metric]
    if not args.all and args.metric is None:
        raise CliError("pass --metric <id> or --all")
    lines = []
    for mid in ids:
        _, evaluator = _resolve_metric_id(mid)
        try:
            lines.append(f"{mid} {evaluator(ref, dist):.4f}")
        except MetricError as e:
            raise CliError(str(e)) from None
    print("\n".join(lines))
    return EXIT_OK


def cmd_encode(args) -> int:
    _register_external(args)
    image = _load_image(args.infile)
    codec = _resolve_codec(args.codec)
    try:
        param = ControlParameter(codec.descriptor.param_kind, args.param)
        blob = codec.compress(image, param)
    except (CodecError, ValueError) as e:
        raise CliError(str(e)) from None
    Path(args.out).write_bytes(blob.to_bytes())
    print(f"payload={len(blob.payload)} cr={compression_ratio(image, blob):.4f} "
          f"bpp={bits_per_pixel(image, blob):.4f}")
    return EXIT_OK


def cmd_decode(args) -> int:
    _register_external(args)
    try:
        blob = CompressedBlob.from_bytes(_read_file(args.infile, "blob"))
        codec = get_codec(blob.codec_id)
        image = codec.decompress(blob)
    except (ContainerError, CodecError) as e:
        raise CliError(str(e)) from None
    Path(args.out).write_bytes(store_pgm(image))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        Path(args.store), max_workers=args.workers, enable_stub=args.with_stub,
        stub_delay=args.stub_delay, frontend_dir=Path(args.frontend) if args.frontend else None,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--codec", default="bdct", help="codec id (default bdct)")
    p.add_argument("--metric", default="psnr", help="metric id (default psnr)")
    p.add_argument("--param-min", type=float, default=None, help="range minimum")
    p.add_argument("--param-max", type=float, default=None, help="range maximum")
    p.add_argument("--external", default=None, metavar="CONFIG",
                   help="register an external codec adapter from a config file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qpress", description=__doc__)
    ap.add_argument("--version", action="version", version=f"qpress {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="compress to a target metric value")
    p.add_argument("--in", dest="infile", required=True, help="input PGM")
    _add_search_flags(p)
    p.add_argument("--target", type=float, required=True, help="target metric value")
    p.add_argument("--delta", type=float, default=None,
                   help="tolerance (default 0.1 dB / 0.005 unitless)")
    p.add_argument("--method", choices=("bisect", "interp"), default="interp")
    p.add_argument("--seed", type=float, default=None, help="interpolation start parameter")
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--clamp", action="store_true",
                   help="clamp to the closest range endpoint instead of failing")
    p.add_argument("--out", required=True, help="output blob path")
    p.add_argument("--decoded-out", default=None, help="optional decoded PGM path")
    p.add_argument("--report", default=None, help="optional JSON report path")
    p.set_defaults(fn=cmd_compress)

    p = sub.add_parser("estimate", help="metric span over the parameter range")
    p.add_argument("--in", dest="infile", required=True)
    _add_search_flags(p)
    p.add_argument("--report", default=None)
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("cube", help="component-wise cube compression")
    p.add_argument("--in", dest="infile", required=True, help="RAW band-sequential input")
    p.add_argument("--desc", required=True, help="sidecar descriptor")
    _add_search_flags(p)
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--method", choices=("bisect", "interp"), default="interp")
    p.add_argument("--clamp", action="store_true")
    p.add_argument("--homomorphic", action="store_true",
                   help="compress in the log-transformed domain")
    p.add_argument("--workers", type=int, default=1, help="concurrent bands")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_cube)

    p = sub.add_parser("measure", help="compute metrics between two images")
    p.add_argument("--ref", required=True)
    p.add_argument("--dist", required=True)
    p.add_argument("--metric", default=None)
    p.add_argument("--all", action="store_true", help="print all metrics")
    p.set_defaults(fn=cmd_measure)

    p = sub.add_parser("encode", help="single compression at a fixed parameter")
    p.add_argument("--in", dest="infile", required=True)
    _add_search_flags(p)
    p.add_argument("--param", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("decode", help="decompress a blob to PGM")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--external", default=None, metavar="CONFIG")
    p.set_defaults(fn=cmd_decode)

    p = sub.add_parser("serve", help="run the job service")
    p.add_argument("--store", default="qpress-store")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8712)
    p.add_argument("--workers", type=int, default=2)
    p.add_argument("--with-stub", action="store_true",
                   help="register a slow stub codec/metric for UI testing")
    p.add_argument("--stub-delay", type=float, default=0.2)
    p.add_argument("--frontend", default=None, help="static web UI directory to serve at /")
    p.set_defaults(fn=cmd_serve)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (SearchError, MetricError, CodecError, ImageFormatError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
