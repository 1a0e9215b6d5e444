import json

import numpy as np
import pytest

from panoloop.cli import EXIT_INPUT, EXIT_OK, EXIT_SCRIPT, EXIT_USAGE, main
from panoloop.projection import ProjectionParams, to_equirect
from panoloop.store import load_frame, save_frame
from panoloop.yaw import recenter

from .conftest import random_frame

# pinned from the first successful run of `panoloop chain` with these flags;
# regenerate with: panoloop chain --prompt "canyon winds" --segments 3
#   --seed 0 --width 64 --fps 2 --duration 1 --yaw-script <script> --json
GOLDEN_CHAIN_SHA256 = "73fffcf0ff7863db0bf979af86005e89dba44399e345553b7c205983cbbf423c"

CHAIN_SCRIPT = """\
# keep the prompt, look 45 degrees right
segment 1: reuse yaw 45
segment 2: speech storm yaw -90
"""


@pytest.fixture
def src_png(tmp_path, rng):
    path = tmp_path / "src.png"
    save_frame(random_frame(rng, 40, 30), path)
    return path


def run(*argv):
    return main([str(a) for a in argv])


class TestConvert:
    def test_single_png(self, tmp_path, src_png, capsys):
        out = tmp_path / "out"
        assert run("convert", src_png, out, "--width", "128") == EXIT_OK
        frame = load_frame(out / "frame_00000.png")
        assert frame.width == 128 and frame.height == 64
        assert "seam=" in capsys.readouterr().out
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["frames"] == 1 and manifest["width"] == 128

    def test_matches_library_call(self, tmp_path, src_png):
        out = tmp_path / "out"
        assert run("convert", src_png, out, "--width", "128") == EXIT_OK
        expected = to_equirect(load_frame(src_png), ProjectionParams(out_width=128))
        assert load_frame(out / "frame_00000.png") == expected

    def test_missing_input_exits_2(self, tmp_path):
        assert run("convert", tmp_path / "nope.png", tmp_path / "out") == EXIT_INPUT

    def test_bad_band_frac_exits_64(self, tmp_path, src_png):
        assert (
            run("convert", src_png, tmp_path / "o", "--band-frac", "0.6") == EXIT_USAGE
        )

    def test_unknown_flag_exits_64(self, tmp_path, src_png):
        assert run("convert", src_png, tmp_path / "o", "--nope") == EXIT_USAGE


class TestRecenter:
    @pytest.fixture
    def pano_dir(self, tmp_path, src_png):
        out = tmp_path / "pano"
        run("convert", src_png, out, "--width", "64")
        return out

    def test_shift_matches_roll(self, tmp_path, pano_dir):
        out = tmp_path / "shifted"
        assert run("recenter", pano_dir, out, "--yaw", "45") == EXIT_OK
        before = load_frame(pano_dir / "frame_00000.png")
        after = load_frame(out / "frame_00000.png")
        assert np.array_equal(after.pixels, np.roll(before.pixels, -8, axis=1))
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["cumulative_yaw"] == 45.0

    @pytest.mark.parametrize("yaw", ["0", "360"])
    def test_identity_yaws(self, tmp_path, pano_dir, yaw):
        out = tmp_path / f"same{yaw}"
        assert run("recenter", pano_dir, out, "--yaw", yaw) == EXIT_OK
        assert (out / "frame_00000.png").read_bytes() == (
            pano_dir / "frame_00000.png"
        ).read_bytes()

    def test_pipeline_composition_matches_memory(self, tmp_path, src_png):
        pano = tmp_path / "p"
        shifted = tmp_path / "s"
        run("convert", src_png, pano, "--width", "64")
        run("recenter", pano, shifted, "--yaw", "-90")
        expected = recenter(
            to_equirect(load_frame(src_png), ProjectionParams(out_width=64)), -90
        )
        assert load_frame(shifted / "frame_00000.png") == expected


class TestConcatAndSeam:
    def test_concat_two_dirs(self, tmp_path, rng):
        dirs = []
        for d in range(2):
            dd = tmp_path / f"d{d}"
            dd.mkdir()
            for i in range(2):
                save_frame(random_frame(rng, 16, 8), dd / f"frame_{i:05d}.png")
            dirs.append(dd)
        out = tmp_path / "cat"
        assert run("concat", *dirs, out) == EXIT_OK
        assert sorted(p.name for p in out.glob("frame_*.png")) == [
            f"frame_{i:05d}.png" for i in range(4)
        ]

    def test_concat_dimension_mismatch_exits_2(self, tmp_path, rng):
        a, b = tmp_path / "a", tmp_path / "b"
        a.mkdir(), b.mkdir()
        save_frame(random_frame(rng, 16, 8), a / "frame_00000.png")
        save_frame(random_frame(rng, 8, 4), b / "frame_00000.png")
        assert run("concat", a, b, tmp_path / "cat") == EXIT_INPUT

    def test_seam_improves_with_blending(self, tmp_path, src_png, capsys):
        blended = tmp_path / "blended"
        hard = tmp_path / "hard"
        run("convert", src_png, blended, "--width", "64")
        run("convert", src_png, hard, "--width", "64", "--band-frac", "0")
        for target in (blended, hard):
            assert run("seam", target, "--json") == EXIT_OK
        out = capsys.readouterr().out.strip().splitlines()
        blended_score = json.loads(out[-2])["mean"]
        hard_score = json.loads(out[-1])["mean"]
        assert blended_score <= hard_score


class TestChain:
    def chain_args(self, tmp_path, script=CHAIN_SCRIPT):
        spath = tmp_path / "script.txt"
        spath.write_text(script)
        out = tmp_path / "final"
        return [
            "chain", "--prompt", "canyon winds", "--segments", "3", "--seed", "0",
            "--width", "64", "--fps", "2", "--duration", "1",
            "--yaw-script", spath, "--out", out, "--json",
        ], out

    def test_scripted_chain_matches_golden(self, tmp_path, capsys):
        args, out = self.chain_args(tmp_path)
        assert run(*args) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["frames"] == 6
        assert payload["duration_seconds"] == 3.0
        assert payload["sha256"] == GOLDEN_CHAIN_SHA256
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["sha256"] == GOLDEN_CHAIN_SHA256

    def test_rerun_is_hash_identical(self, tmp_path, capsys):
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        args1, _ = self.chain_args(tmp_path / "a")
        args2, _ = self.chain_args(tmp_path / "b")
        assert run(*args1) == EXIT_OK
        first = json.loads(capsys.readouterr().out)["sha256"]
        assert run(*args2) == EXIT_OK
        second = json.loads(capsys.readouterr().out)["sha256"]
        assert first == second

    def test_empty_script_reuses_prompt_at_yaw_zero(self, tmp_path, capsys):
        out = tmp_path / "final"
        assert run(
            "chain", "--prompt", "canyon winds", "--segments", "2", "--seed", "1",
            "--width", "64", "--fps", "2", "--duration", "0.5", "--out", out,
        ) == EXIT_OK
        assert (out / "frame_00001.png").exists()

    @pytest.mark.parametrize(
        "script",
        [
            "segment one: reuse\n",          # unparsable index
            "segment 0: reuse\n",            # segment 0 comes from flags
            "segment 9: reuse\n",            # out of range
            "segment 1: reuse\nsegment 1: reuse\n",  # duplicate
            "segment 1: speech nope\n",      # unknown fixture
        ],
    )
    def test_bad_scripts_exit_65(self, tmp_path, script):
        args, _ = self.chain_args(tmp_path, script=script)
        assert run(*args) == EXIT_SCRIPT


class TestBench:
    def test_bench_reports(self, tmp_path, capsys):
        assert run("bench", "--width", "128", "--json") == EXIT_OK
        results = json.loads(capsys.readouterr().out)["results"]
        assert {r["name"] for r in results} == {"recenter", "to_equirect"}
        assert all(r["fps"] > 0 for r in results)
