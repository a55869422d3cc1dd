"""CLI: exit statuses, summary lines, thin-shell equality with the library."""

import json

import numpy as np
import pytest

from conftest import make_cube16
from qpress import (
    QualityTarget,
    RasterImage,
    cube_to_raw,
    format_raw_descriptor,
    get_codec,
    load_pgm,
    run_with_report,
    store_pgm,
)
from qpress.cli import main
from qpress.params import ParameterRange


@pytest.fixture()
def pgm_file(tmp_path, camera):
    path = tmp_path / "camera.pgm"
    path.write_bytes(store_pgm(camera))
    return path


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestMeasure:
    def test_identity_all_metrics(self, tmp_path, pgm_file, capsys):
        assert run_cli("measure", "--ref", pgm_file, "--dist", pgm_file, "--all") == 0
        out = capsys.readouterr().out.strip().splitlines()
        values = dict(line.split() for line in out)
        assert values == {
            "psnr": "100.0000",
            "ssim": "1.0000",
            "msssim": "1.0000",
            "wsnr": "100.0000",
            "psnr_hvs": "100.0000",
            "psnr_hvs_m": "100.0000",
        }

    def test_single_metric_value(self, tmp_path, capsys):
        a = tmp_path / "a.pgm"
        b = tmp_path / "b.pgm"
        a.write_bytes(store_pgm(RasterImage(np.zeros((16, 16), dtype=np.uint8), 8)))
        b.write_bytes(store_pgm(RasterImage(np.ones((16, 16), dtype=np.uint8), 8)))
        assert run_cli("measure", "--ref", a, "--dist", b, "--metric", "psnr") == 0
        assert capsys.readouterr().out.strip() == "psnr 48.1308"

    def test_dimension_mismatch_exit_1(self, tmp_path, pgm_file, capsys):
        small = tmp_path / "small.pgm"
        small.write_bytes(store_pgm(RasterImage(np.zeros((16, 16), dtype=np.uint8), 8)))
        assert run_cli("measure", "--ref", pgm_file, "--dist", small, "--metric", "psnr") == 1


class TestCompress:
    def test_converged_run(self, tmp_path, pgm_file, capsys):
        out = tmp_path / "out.qpb"
        decoded = tmp_path / "decoded.pgm"
        report = tmp_path / "report.json"
        status = run_cli(
            "compress", "--in", pgm_file, "--target", "38", "--out", out,
            "--decoded-out", decoded, "--report", report,
        )
        assert status == 0
        line = capsys.readouterr().out.strip()
        assert line.startswith("status=converged")
        assert "iterations=" in line and "cr=" in line
        assert out.exists() and decoded.exists()
        rep = json.loads(report.read_text())
        assert rep["status"] == "converged"
        assert abs(rep["achieved"] - 38.0) <= 0.1
        img = load_pgm(decoded.read_bytes())
        assert (img.width, img.height) == (512, 512)

    def test_cli_equals_library(self, tmp_path, pgm_file, camera, capsys):
        report_path = tmp_path / "r.json"
        run_cli(
            "compress", "--in", pgm_file, "--target", "38", "--out", tmp_path / "o.qpb",
            "--report", report_path,
        )
        cli_report = json.loads(report_path.read_text())
        codec = get_codec("bdct")
        _, lib_report = run_with_report(
            camera, codec, "psnr", QualityTarget("psnr", 38.0, 0.1),
            ParameterRange("quantization_step", 1.0, 64.0), method="interp",
        )
        assert cli_report == lib_report

    def test_infeasible_exit_2_cites_span(self, tmp_path, pgm_file, capsys):
        status = run_cli(
            "compress", "--in", pgm_file, "--target", "5",
            "--out", tmp_path / "o.qpb", "--report", tmp_path / "r.json",
        )
        assert status == 2
        err = capsys.readouterr().err
        assert "achievable=[" in err
        assert not (tmp_path / "o.qpb").exists()
        rep = json.loads((tmp_path / "r.json").read_text())
        assert rep["status"] == "infeasible"
        assert len(rep["achievable_interval"]) == 2

    def test_missing_input_exit_1_no_outputs(self, tmp_path, capsys):
        out = tmp_path / "never.qpb"
        status = run_cli(
            "compress", "--in", tmp_path / "missing.pgm", "--target", "38", "--out", out
        )
        assert status == 1
        assert not out.exists()

    def test_bad_target_exit_1(self, tmp_path, pgm_file):
        assert run_cli(
            "compress", "--in", pgm_file, "--target", "500",
            "--out", tmp_path / "o.qpb",
        ) == 1

    def test_bad_range_exit_1(self, tmp_path, pgm_file):
        assert run_cli(
            "compress", "--in", pgm_file, "--target", "38", "--out", tmp_path / "o.qpb",
            "--param-min", "10", "--param-max", "2",
        ) == 1


class TestEstimate:
    def test_prints_span(self, tmp_path, pgm_file, capsys):
        assert run_cli("estimate", "--in", pgm_file) == 0
        out = capsys.readouterr().out
        assert "value_at_param_min=" in out
        assert "achievable_interval=[" in out

    def test_matches_library(self, tmp_path, pgm_file, camera, capsys):
        report = tmp_path / "e.json"
        run_cli("estimate", "--in", pgm_file, "--report", report)
        rep = json.loads(report.read_text())
        from qpress import estimate_range

        span = estimate_range(camera, get_codec("bdct"), "psnr")
        assert rep["value_at_param_min"] == span.value_at_param_min.value
        assert rep["value_at_param_max"] == span.value_at_param_max.value


class TestEncodeDecode:
    def test_roundtrip(self, tmp_path, pgm_file, capsys):
        blob = tmp_path / "x.qpb"
        back = tmp_path / "back.pgm"
        assert run_cli("encode", "--in", pgm_file, "--param", "4", "--out", blob) == 0
        assert run_cli("decode", "--in", blob, "--out", back) == 0
        codec = get_codec("bdct")
        from qpress import ControlParameter

        direct = codec.compress(
            load_pgm(pgm_file.read_bytes()), ControlParameter("quantization_step", 4.0)
        )
        assert blob.read_bytes() == direct.to_bytes()
        assert load_pgm(back.read_bytes()) == codec.decompress(direct)


class TestCube:
    @pytest.fixture()
    def raw_cube(self, tmp_path):
        cube = make_cube16(bands=3, height=96, width=128)
        data, desc = cube_to_raw(cube)
        raw = tmp_path / "cube.raw"
        side = tmp_path / "cube.desc"
        raw.write_bytes(data)
        side.write_text(format_raw_descriptor(desc))
        return raw, side, cube

    def test_cube_converges(self, tmp_path, raw_cube, capsys):
        raw, side, cube = raw_cube
        out_dir = tmp_path / "out"
        status = run_cli(
            "cube", "--in", raw, "--desc", side, "--target", "45",
            "--param-min", "16", "--param-max", "16384", "--out-dir", out_dir,
        )
        assert status == 0
        manifest = json.loads((out_dir / "cube_manifest.json").read_text())
        assert manifest["status"] == "ok"
        assert len(manifest["bands"]) == 3
        for entry in manifest["bands"]:
            assert entry["report"]["status"] == "converged"
            assert (out_dir / entry["blob"]).exists()

    def test_corrupt_sidecar_exit_1(self, tmp_path, raw_cube):
        raw, side, _ = raw_cube
        bad = tmp_path / "bad.desc"
        bad.write_text("nonsense")
        assert run_cli(
            "cube", "--in", raw, "--desc", bad, "--target", "45",
            "--out-dir", tmp_path / "o",
        ) == 1

    def test_infeasible_band_exit_4_partial_manifest(self, tmp_path, raw_cube, capsys):
        raw, side, _ = raw_cube
        out_dir = tmp_path / "out4"
        status = run_cli(
            "cube", "--in", raw, "--desc", side, "--target", "20", "--delta", "0.01",
            "--param-min", "16", "--param-max", "32", "--out-dir", out_dir,
        )
        assert status == 4
        manifest = json.loads((out_dir / "cube_manifest.json").read_text())
        assert manifest["status"] == "failed"
