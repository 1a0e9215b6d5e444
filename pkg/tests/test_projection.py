import numpy as np
import pytest

from panoloop.errors import InvalidInputError, InvalidParameterError
from panoloop.frames import EquirectFrame, Frame, solid_frame
from panoloop.projection import (
    ProjectionParams,
    edge_blend,
    foreground_geometry,
    resize_bilinear,
    seam_continuity,
    to_equirect,
)

from .conftest import random_equirect, striped_frame


class TestProjectionParams:
    def test_defaults(self):
        p = ProjectionParams()
        assert p.out_width == 2048 and p.out_height == 1024
        assert p.fg_height_frac == 0.75

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"out_width": 2047},
            {"out_width": 2},
            {"fg_height_frac": 0.0},
            {"fg_height_frac": 1.2},
            {"blend_band_frac": 0.5},
            {"blend_band_frac": -0.1},
            {"blur_sigma_frac": -0.5},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(InvalidParameterError):
            ProjectionParams(**kwargs)


class TestToEquirect:
    def test_reference_geometry(self):
        # 1280x768 source on a 2048-wide canvas: the 75% rule gives a 768-tall
        # foreground at native width, centered at x 384
        params = ProjectionParams(out_width=2048)
        fg_w, fg_h, x0, y0 = foreground_geometry(1280, 768, params)
        assert (fg_w, fg_h, x0, y0) == (1280, 768, 384, 128)

    def test_output_is_two_to_one(self, rng):
        for width in (64, 256, 1024):
            src = Frame(rng.integers(0, 256, (50, 70, 3), dtype=np.uint8))
            out = to_equirect(src, ProjectionParams(out_width=width))
            assert out.width == width and out.width == 2 * out.height

    def test_uniform_source_is_fixed_point(self):
        src = solid_frame(40, 30, (93, 93, 93))
        out = to_equirect(src, ProjectionParams(out_width=128))
        assert np.all(out.pixels == 93)

    def test_foreground_pasted_byte_exact(self):
        # blur and blend off: the foreground band must equal the resampled
        # source exactly, and rows just outside it come from the squeezed
        # background so they differ
        params = ProjectionParams(out_width=256, blur_sigma_frac=0.0, blend_band_frac=0.0)
        src = striped_frame(100, 77)
        out = to_equirect(src, params).pixels
        fg_w, fg_h, x0, y0 = foreground_geometry(src.width, src.height, params)
        expected = resize_bilinear(src.pixels, fg_w, fg_h)
        assert np.array_equal(out[y0 : y0 + fg_h, x0 : x0 + fg_w], expected)
        assert not np.array_equal(out[y0 - 1, x0 : x0 + fg_w], expected[0])
        assert not np.array_equal(out[y0 + fg_h, x0 : x0 + fg_w], expected[-1])

    def test_oversized_foreground_is_center_cropped(self):
        # a very wide source overflows the canvas horizontally
        params = ProjectionParams(out_width=64, blur_sigma_frac=0.0, blend_band_frac=0.0)
        src = striped_frame(600, 20)
        out = to_equirect(src, params)
        assert out.width == 64 and out.height == 32

    def test_rejects_non_frame(self):
        with pytest.raises(InvalidInputError):
            to_equirect(np.zeros((4, 4, 3), np.uint8), ProjectionParams(out_width=64))

    def test_applies_edge_blend(self, rng):
        params = ProjectionParams(out_width=128, blend_band_frac=0.05)
        src = Frame(rng.integers(0, 256, (33, 47, 3), dtype=np.uint8))
        out = to_equirect(src, params)
        unblended = to_equirect(
            src, ProjectionParams(out_width=128, blend_band_frac=0.0)
        )
        assert seam_continuity(out) <= seam_continuity(unblended)
        assert np.array_equal(
            out.pixels, edge_blend(unblended, 0.05).pixels
        )


class TestEdgeBlend:
    def test_band_zero_is_identity(self, rng):
        frame = random_equirect(rng, 32)
        assert edge_blend(frame, 0.0) is frame

    def test_matching_edges_unchanged_within_rounding(self, rng):
        px = np.array(rng.integers(0, 256, (8, 16, 3), dtype=np.uint8))
        band = 2
        for i in range(band):  # make the wrap continuous: column i mirrors W-1-i
            px[:, -1 - i] = px[:, i]
        frame = EquirectFrame(px)
        out = edge_blend(frame, band / px.shape[1])
        assert np.abs(out.pixels.astype(int) - px.astype(int)).max() <= 1

    def test_black_white_toy_blends_to_mid_gray(self):
        px = np.zeros((4, 8, 3), np.uint8)
        px[:, 4:] = 255
        out = edge_blend(EquirectFrame(px), 0.25).pixels  # band = 2 columns
        assert np.all(np.abs(out[:, 0].astype(int) - 127.5) <= 0.5 + 1)
        assert np.all(out[:, 0] == out[:, -1])
        # linear falloff: the second column mixes at 0.25
        assert np.all(out[:, 1] == round(0.75 * 0 + 0.25 * 255))
        assert np.all(out[:, -2] == round(0.75 * 255 + 0.25 * 0))
        # interior untouched
        assert np.all(out[:, 2:6] == px[:, 2:6])

    def test_converged_seam(self, rng):
        frame = random_equirect(rng, 64)
        out = edge_blend(frame, 0.05)
        assert np.array_equal(out.pixels[:, 0], out.pixels[:, -1])

    def test_invalid_band(self, rng):
        with pytest.raises(InvalidParameterError):
            edge_blend(random_equirect(rng, 16), 0.6)


class TestSeamContinuity:
    def test_uniform_is_zero(self):
        assert seam_continuity(solid_frame(16, 8, (10, 20, 30))) == 0.0

    def test_black_left_white_right_is_one(self):
        px = np.zeros((4, 8, 3), np.uint8)
        px[:, -1] = 255
        assert seam_continuity(Frame(px)) == 1.0

    def test_blending_strictly_improves_toy(self):
        px = np.zeros((4, 8, 3), np.uint8)
        px[:, 4:] = 255
        frame = EquirectFrame(px)
        before = seam_continuity(frame)
        after = seam_continuity(edge_blend(frame, 0.25))
        assert after < before
