"""Job service for the operator web console.

Thin shell over the library: image upload (content-addressed store),
asynchronous search jobs with a live probe trace, and artifact retrieval
(original/decoded/diff images, report, blob). Wire format is JSON plus PGM
bytes for images; endpoint schemas are documented in docs/FORMATS.md.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, File, HTTPException, Response, UploadFile
from pydantic import BaseModel

from .codec import available_codecs, get_codec, register_codec
from .cube import CubeBandError, compress_cube
from .image import (
    ImageFormatError,
    RasterImage,
    SpectralCube,
    load_pgm,
    parse_raw_descriptor,
    format_raw_descriptor,
    raw_to_cube,
    store_pgm,
)
from .metrics import available_metrics, metric_registry, register_metric
from .params import ParameterRange
from .search import (
    InfeasibleTargetError,
    QualityTarget,
    SearchError,
    estimate_range,
    run_with_report,
)
from .stub import StubCodec

__all__ = ["create_app"]


class JobSpec(BaseModel):
    image_id: str
    kind: str = "search"  # search | estimate | cube
    codec_id: str = "bdct"
    metric_id: str = "psnr"
    target: Optional[float] = None
    delta: Optional[float] = None
    param_min: Optional[float] = None
    param_max: Optional[float] = None
    method: str = "interp"
    clamp: bool = False
    homomorphic: bool = False


@dataclass
class _Job:
    job_id: str
    spec: JobSpec
    state: str = "queued"  # queued -> running -> done | failed
    submitted_at: float = field(default_factory=time.time)
    probes: list[dict] = field(default_factory=list)
    report: dict | None = None
    error: str | None = None
    achievable_interval: list[float] | None = None
    diff_max: int | None = None
    artifacts: dict = field(default_factory=dict)  # name -> bytes

    def snapshot(self) -> dict:
        return {
            "job_id": self.job_id,
            "state": self.state,
            "submitted_at": self.submitted_at,
            "spec": self.spec.model_dump(),
            "probes": list(self.probes),
            "report": self.report,
            "error": self.error,
            "achievable_interval": self.achievable_interval,
            "diff_max": self.diff_max,
        }


class _Store:
    """Content-addressed image store plus an append-style job log."""

    def __init__(self, root: Path):
        self.root = root
        (root / "images").mkdir(parents=True, exist_ok=True)
        (root / "jobs").mkdir(parents=True, exist_ok=True)

    def _write_atomic(self, path: Path, data: bytes) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_bytes(data)
        tmp.replace(path)

    def put_pgm(self, data: bytes) -> tuple[str, RasterImage]:
        image = load_pgm(data)
        canonical = store_pgm(image)
        image_id = hashlib.sha256(canonical).hexdigest()
        path = self.root / "images" / f"{image_id}.pgm"
        if not path.exists():
            self._write_atomic(path, canonical)
        return image_id, image

    def put_raw(self, data: bytes, descriptor_text: str) -> tuple[str, SpectralCube]:
        desc = parse_raw_descriptor(descriptor_text)
        cube = raw_to_cube(data, desc)
        canonical_desc = format_raw_descriptor(desc).encode()
        image_id = hashlib.sha256(canonical_desc + data).hexdigest()
        base = self.root / "images"
        if not (base / f"{image_id}.raw").exists():
            self._write_atomic(base / f"{image_id}.desc", canonical_desc)
            self._write_atomic(base / f"{image_id}.raw", data)
        return image_id, cube

    def get_pgm(self, image_id: str) -> RasterImage | None:
        path = self.root / "images" / f"{image_id}.pgm"
        if not path.exists():
            return None
        return load_pgm(path.read_bytes())

    def get_cube(self, image_id: str) -> SpectralCube | None:
        raw = self.root / "images" / f"{image_id}.raw"
        desc = self.root / "images" / f"{image_id}.desc"
        if not raw.exists() or not desc.exists():
            return None
        return raw_to_cube(raw.read_bytes(), parse_raw_descriptor(desc.read_text()))

    def log_job(self, job: _Job) -> None:
        self._write_atomic(
            self.root / "jobs" / f"{job.job_id}.json",
            json.dumps(job.snapshot()).encode(),
        )


def _diff_display(original: RasterImage, decoded: RasterImage) -> tuple[bytes, int]:
    """8-bit normalized absolute-difference image plus the raw max."""
    diff = np.abs(original.as_float() - decoded.as_float())
    max_diff = int(diff.max())
    if max_diff == 0:
        disp = np.zeros(diff.shape, dtype=np.uint8)
    else:
        disp = np.rint(diff * (255.0 / max_diff)).astype(np.uint8)
    return store_pgm(RasterImage(disp, 8)), max_diff


def _register_stub(delay: float) -> None:
    stub = StubCodec(
        lambda p: 60.0 - p,
        ParameterRange("quantization_step", 1.0, 50.0),
        codec_id="stub",
        metric_id="stub",
    )
    desc, evaluate = stub.metric()

    def slow_evaluate(ref, dist):
        time.sleep(delay)
        return evaluate(ref, dist)

    register_codec(stub, replace=True)
    register_metric(desc, slow_evaluate, replace=True)


def create_app(
    store_dir: Path,
    max_workers: int = 2,
    enable_stub: bool = False,
    stub_delay: float = 0.2,
    frontend_dir: Path | None = None,
) -> FastAPI:
    store = _Store(Path(store_dir))
    if enable_stub:
        _register_stub(stub_delay)
    app = FastAPI(title="qpress service")
    pool = ThreadPoolExecutor(max_workers=max_workers, thread_name_prefix="qpress-job")
    jobs: dict[str, _Job] = {}
    lock = threading.Lock()

    def fail(code: int, message: str):
        raise HTTPException(status_code=code, detail=message)

    # ------------------------------------------------------------- meta

    @app.get("/api/meta")
    def meta():
        return {
            "codecs": {
                cid: {
                    "param_kind": d.param_kind.value,
                    "param_min": d.default_range.min,
                    "param_max": d.default_range.max,
                    "quality_direction": d.quality_direction.value,
                }
                for cid, d in available_codecs().items()
            },
            "metrics": {
                mid: {
                    "units": d.units.value,
                    "lo": d.lo,
                    "hi": d.hi,
                    "default_tolerance": d.default_tolerance,
                }
                for mid, d in available_metrics().items()
            },
        }

    # ----------------------------------------------------------- images

    @app.post("/api/images")
    def upload_image(file: UploadFile = File(...), descriptor: UploadFile | None = File(None)):
        data = file.file.read()
        try:
            if descriptor is not None:
                image_id, cube = store.put_raw(data, descriptor.file.read().decode())
                return {
                    "image_id": image_id,
                    "kind": "raw",
                    "width": cube.width,
                    "height": cube.height,
                    "bit_depth": cube.bit_depth,
                    "bands": len(cube),
                }
            image_id, image = store.put_pgm(data)
            return {
                "image_id": image_id,
                "kind": "pgm",
                "width": image.width,
                "height": image.height,
                "bit_depth": image.bit_depth,
                "bands": 1,
            }
        except (ImageFormatError, UnicodeDecodeError) as e:
            fail(400, f"malformed upload: {e}")

    def _pgm_response(image: RasterImage) -> Response:
        return Response(content=store_pgm(image), media_type="image/x-portable-graymap")

    @app.get("/api/images/{image_id}")
    def fetch_image(image_id: str, band: int = 0):
        image = store.get_pgm(image_id)
        if image is not None:
            return _pgm_response(image)
        cube = store.get_cube(image_id)
        if cube is None:
            fail(404, f"unknown image {image_id}")
        if not 0 <= band < len(cube):
            fail(404, f"band {band} out of range")
        return _pgm_response(cube.bands[band])

    # ------------------------------------------------------------- jobs

    def _validate_spec(spec: JobSpec) -> tuple:
        if spec.kind not in ("search", "estimate", "cube"):
            fail(422, f"unknown job kind {spec.kind!r}")
        if spec.method not in ("bisect", "interp"):
            fail(422, f"unknown method {spec.method!r}")
        image = store.get_pgm(spec.image_id)
        cube = store.get_cube(spec.image_id) if image is None else None
        if image is None and cube is None:
            fail(404, f"unknown image {spec.image_id}")
        if spec.kind == "cube" and cube is None:
            fail(422, "cube jobs need a RAW upload")
        if spec.kind in ("search", "estimate") and image is None:
            fail(422, f"{spec.kind} jobs need a PGM upload")
        try:
            codec = get_codec(spec.codec_id)
        except Exception as e:
            fail(422, str(e))
        try:
            mdesc, _ = metric_registry(spec.metric_id)
        except Exception as e:
            fail(422, str(e))
        default = codec.descriptor.default_range
        lo = spec.param_min if spec.param_min is not None else default.min
        hi = spec.param_max if spec.param_max is not None else default.max
        try:
            prange = ParameterRange(default.kind, lo, hi)
        except ValueError as e:
            fail(422, str(e))
        target = None
        if spec.kind in ("search", "cube"):
            if spec.target is None:
                fail(422, "search jobs need a target")
            delta = spec.delta if spec.delta is not None else mdesc.default_tolerance
            if delta <= 0:
                fail(422, "delta must be positive")
            if not mdesc.contains(spec.target):
                fail(422, f"target outside the {spec.metric_id} range [{mdesc.lo}, {mdesc.hi}]")
            target = QualityTarget(spec.metric_id, spec.target, delta)
        return image, cube, codec, prange, target

    def _run_job(job: _Job, image, cube, codec, prange, target) -> None:
        with lock:
            job.state = "running"
            store.log_job(job)

        def on_probe(phase: str, param: float, value: float, band: int | None = None):
            entry = {"phase": phase, "param": param, "value": value}
            if band is not None:
                entry["band"] = band
            with lock:
                job.probes.append(entry)

        try:
            spec = job.spec
            if spec.kind == "estimate":
                span = estimate_range(image, codec, spec.metric_id, prange, on_probe=on_probe)
                lo, hi = span.achievable_interval
                with lock:
                    job.report = {
                        "kind": "estimate",
                        "metric_id": spec.metric_id,
                        "codec_id": spec.codec_id,
                        "param_min": prange.min,
                        "param_max": prange.max,
                        "value_at_param_min": span.value_at_param_min.value,
                        "value_at_param_max": span.value_at_param_max.value,
                        "achievable_interval": [lo, hi],
                    }
                    job.achievable_interval = [lo, hi]
                    job.state = "done"
            elif spec.kind == "search":
                result, report = run_with_report(
                    image, codec, spec.metric_id, target, prange,
                    method=spec.method, clamp=spec.clamp, on_probe=on_probe,
                )
                decoded = codec.decompress(result.blob)
                diff_bytes, diff_max = _diff_display(image, decoded)
                with lock:
                    job.report = report
                    job.diff_max = diff_max
                    job.artifacts = {
                        "decoded": store_pgm(decoded),
                        "diff": diff_bytes,
                        "blob": result.blob.to_bytes(),
                    }
                    job.state = "done"
            else:  # cube
                result = compress_cube(
                    cube, codec, spec.metric_id, target, prange,
                    method=spec.method, use_homomorphic=spec.homomorphic,
                    clamp=spec.clamp,
                    on_band_probe=lambda b, ph, p, v: on_probe(ph, p, v, band=b),
                )
                bands = []
                artifacts = {}
                for o in result.per_band:
                    band_img = cube.bands[o.index]
                    decoded = codec.decompress(o.result.blob)
                    if o.transform is not None:
                        decoded = o.transform.inverse(decoded)
                    diff_bytes, diff_max = _diff_display(band_img, decoded)
                    artifacts[f"decoded:{o.index}"] = store_pgm(decoded)
                    artifacts[f"diff:{o.index}"] = diff_bytes
                    artifacts[f"blob:{o.index}"] = o.result.blob.to_bytes()
                    bands.append({
                        "band": o.index,
                        "status": o.result.status.value,
                        "achieved": o.result.achieved_value.value,
                        "final_param": o.result.final_param.value,
                        "iterations": o.result.iterations,
                        "cr": o.result.cr,
                        "bpp": o.result.bpp,
                        "diff_max": diff_max,
                        "transform": o.transform.to_dict() if o.transform else None,
                    })
                with lock:
                    job.report = {
                        "kind": "cube",
                        "aggregate_cr": result.aggregate_cr,
                        "total_iterations": result.total_iterations,
                        "bands": bands,
                    }
                    job.artifacts = artifacts
                    job.state = "done"
        except InfeasibleTargetError as e:
            lo, hi = e.span.achievable_interval
            with lock:
                job.state = "failed"
                job.error = str(e)
                job.achievable_interval = [lo, hi]
        except (SearchError, CubeBandError, ValueError) as e:
            with lock:
                job.state = "failed"
                job.error = str(e)
                if isinstance(e, CubeBandError) and isinstance(e.cause, InfeasibleTargetError):
                    lo, hi = e.cause.span.achievable_interval
                    job.achievable_interval = [lo, hi]
        finally:
            with lock:
                store.log_job(job)

    @app.post("/api/jobs", status_code=202)
    def submit_job(spec: JobSpec):
        parts = _validate_spec(spec)
        job = _Job(job_id=uuid.uuid4().hex[:16], spec=spec)
        with lock:
            jobs[job.job_id] = job
            store.log_job(job)
        pool.submit(_run_job, job, *parts)
        return {"job_id": job.job_id}

    def _get_job(job_id: str) -> _Job:
        with lock:
            job = jobs.get(job_id)
        if job is None:
            fail(404, f"unknown job {job_id}")
        return job

    @app.get("/api/jobs")
    def list_jobs():
        with lock:
            items = [j.snapshot() for j in jobs.values()]
        items.sort(key=lambda j: j["submitted_at"])
        for j in items:
            j.pop("probes", None)
        return {"jobs": items}

    @app.get("/api/jobs/{job_id}")
    def poll_job(job_id: str):
        job = _get_job(job_id)
        with lock:
            return job.snapshot()

    @app.get("/api/jobs/{job_id}/artifacts/{which}")
    def fetch_artifact(job_id: str, which: str, band: int = 0):
        job = _get_job(job_id)
        if which == "original":
            image = store.get_pgm(job.spec.image_id)
            if image is None:
                cube = store.get_cube(job.spec.image_id)
                if cube is None or not 0 <= band < len(cube):
                    fail(404, "original image not found")
                image = cube.bands[band]
            return _pgm_response(image)
        if which == "report":
            with lock:
                if job.state != "done" or job.report is None:
                    fail(409, f"job is {job.state}; report not ready")
                return job.report
        if which not in ("decoded", "diff", "blob"):
            fail(404, f"unknown artifact {which!r}")
        with lock:
            if job.state != "done":
                fail(409, f"job is {job.state}; artifacts not ready")
            key = which if which in job.artifacts else f"{which}:{band}"
            data = job.artifacts.get(key)
        if data is None:
            fail(404, f"artifact {which!r} (band {band}) not available")
        media = "application/octet-stream" if which == "blob" else "image/x-portable-graymap"
        resp = Response(content=data, media_type=media)
        if which == "diff" and job.diff_max is not None:
            resp.headers["X-QPress-Max-Diff"] = str(job.diff_max)
        return resp

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="webui")

    return app
