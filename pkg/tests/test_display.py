import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hdrvdp.display import (
    LUMINANCE_WEIGHTS,
    DisplayModelError,
    DisplayParams,
    apply_display_model,
    pq_eotf_inverse_check,
    pq_inverse_eotf,
    rgb_to_luminance,
)
from hdrvdp.imgio import DisplayEncodedFrame

# ST 2084 evaluated at 40 digits with mpmath, independently of the package
PQ_HALF = 92.24570899406408
PQ_ENCODED_100 = 0.5080784215173949


def test_pq_endpoints():
    assert pq_inverse_eotf(0.0) == 0.0
    assert pq_inverse_eotf(1.0) == pytest.approx(10000.0, rel=1e-12)
    assert pq_eotf_inverse_check(0.0) == 0.0
    assert pq_eotf_inverse_check(10000.0) == pytest.approx(1.0, rel=1e-12)


def test_pq_midpoint_matches_high_precision_evaluation():
    assert pq_inverse_eotf(0.5) == pytest.approx(PQ_HALF, rel=1e-12)
    assert pq_eotf_inverse_check(100.0) == pytest.approx(PQ_ENCODED_100, rel=1e-12)


def test_pq_round_trip_at_100_nits():
    assert 99.99 <= pq_inverse_eotf(pq_eotf_inverse_check(100.0)) <= 100.01


@given(st.floats(0, 1), st.floats(0, 1))
def test_pq_monotone(a, b):
    lo, hi = sorted((a, b))
    assert pq_inverse_eotf(lo) <= pq_inverse_eotf(hi)


def test_pq_strictly_increasing_inside():
    v = np.linspace(1e-3, 1 - 1e-3, 5000)
    assert np.all(np.diff(pq_inverse_eotf(v)) > 0)


def test_pq_out_of_range_tolerant_and_strict():
    with pytest.warns(RuntimeWarning):
        assert pq_inverse_eotf(1.5) == pytest.approx(10000.0)
    with pytest.raises(DisplayModelError):
        pq_inverse_eotf(-0.1, strict=True)
    with pytest.raises(DisplayModelError):
        pq_eotf_inverse_check(20000.0)


def test_black_frame_with_ambient():
    frame = DisplayEncodedFrame(np.zeros((4, 5, 3)), "pq")
    rad = apply_display_model(frame, DisplayParams(ambient=200, reflectivity=0.005))
    floor = 200 * 0.005 / np.pi
    np.testing.assert_allclose(rad.linear_rgb, floor, rtol=1e-12)
    np.testing.assert_allclose(rad.luminance, floor, rtol=1e-12)


def test_no_ambient_is_plain_eotf():
    rng = np.random.default_rng(3)
    data = rng.random((6, 7, 3))
    rad = apply_display_model(DisplayEncodedFrame(data, "pq"), DisplayParams(ambient=0))
    np.testing.assert_array_equal(rad.linear_rgb, pq_inverse_eotf(data))


def test_gamma_white_is_peak():
    frame = DisplayEncodedFrame(np.ones((3, 3, 3)), "srgb")
    p = DisplayParams(eotf="gamma22_srgb", peak_luminance=100, ambient=0, primaries="srgb")
    rad = apply_display_model(frame, p)
    np.testing.assert_allclose(rad.luminance, 100.0, rtol=1e-12)


def test_encoding_mismatch():
    frame = DisplayEncodedFrame(np.ones((3, 3, 3)), "srgb")
    with pytest.raises(DisplayModelError):
        apply_display_model(frame, DisplayParams(eotf="pq"))


def test_linear_frames_skip_eotf_but_get_ambient():
    frame = DisplayEncodedFrame(np.full((2, 2, 3), 250.0), "linear")
    rad = apply_display_model(frame, DisplayParams())
    np.testing.assert_allclose(rad.linear_rgb, 250.0 + 200 * 0.005 / np.pi)


def test_ambient_floor_holds_for_every_channel():
    rng = np.random.default_rng(0)
    frame = DisplayEncodedFrame(rng.random((16, 16, 3)) ** 4, "pq")
    p = DisplayParams(ambient=50, reflectivity=0.02)
    rad = apply_display_model(frame, p)
    assert rad.linear_rgb.min() >= 50 * 0.02 / np.pi - 1e-9


def test_gray_stays_gray():
    v = np.linspace(0, 1, 11)
    frame = DisplayEncodedFrame(np.repeat(v[None, :, None], 3, axis=2), "pq")
    rad = apply_display_model(frame, DisplayParams())
    np.testing.assert_array_equal(rad.linear_rgb[..., 0], rad.linear_rgb[..., 1])
    np.testing.assert_array_equal(rad.linear_rgb[..., 1], rad.linear_rgb[..., 2])
    np.testing.assert_allclose(rad.luminance, rad.linear_rgb[..., 0], rtol=1e-12)


@pytest.mark.parametrize("primaries", sorted(LUMINANCE_WEIGHTS))
def test_luminance_weights(primaries):
    w = LUMINANCE_WEIGHTS[primaries]
    assert sum(w) == pytest.approx(1.0, abs=1e-12)
    x = np.array([[[3.0, 3.0, 3.0]]])
    assert rgb_to_luminance(x, primaries)[0, 0] == pytest.approx(3.0)


def test_luminance_standard_coefficients():
    green = np.array([0.0, 1.0, 0.0])
    blue = np.array([0.0, 0.0, 1.0])
    assert rgb_to_luminance(green, "bt2020") == pytest.approx(0.6780)
    assert rgb_to_luminance(blue, "srgb") == pytest.approx(0.0722)
    with pytest.raises(DisplayModelError):
        rgb_to_luminance(green, "p3")


def test_display_params_validation():
    with pytest.raises(DisplayModelError):
        DisplayParams(ambient=-1)
    with pytest.raises(DisplayModelError):
        DisplayParams(reflectivity=1.5)
    with pytest.raises(DisplayModelError):
        DisplayParams(peak_luminance=1, black_level=2)
