import math

import numpy as np
import pytest
from scipy import integrate

from hdrvdp import default_calibration
from hdrvdp.display import RadianceMap
from hdrvdp.optics import (
    OpticsConfig,
    OpticsError,
    adapted_response,
    apply_glare,
    build_glare_filter,
    eye_mtf,
    local_adaptation,
    photoreceptor_response,
    pupil_diameter,
)

CALIB = default_calibration("quality")
OPTICS = CALIB.optics_params
CSF = CALIB.csf_params


def _radiance(lum):
    return RadianceMap(linear_rgb=np.repeat(lum[..., None], 3, -1), luminance=lum)


@pytest.mark.parametrize("mode", ["mtf", "cie99"])
@pytest.mark.parametrize("shape", [(32, 32), (40, 57)])
def test_dc_gain_is_one(mode, shape):
    filt = build_glare_filter(OpticsConfig(mode, 24, 60), shape[1], shape[0], OPTICS)
    assert filt.shape == (2 * shape[0], 2 * shape[1])
    assert filt[0, 0] == 1.0


def test_mtf_is_low_pass():
    rho = np.linspace(0, 60, 600)
    for age in (20, 50, 80):
        assert np.all(np.diff(eye_mtf(rho, age, OPTICS)) <= 0)


@pytest.mark.parametrize("mode", ["mtf", "cie99"])
@pytest.mark.parametrize("ppd", [30, 60, 120])
def test_older_eyes_transmit_less(mode, ppd):
    young = build_glare_filter(OpticsConfig(mode, 24, ppd), 64, 48, OPTICS)
    old = build_glare_filter(OpticsConfig(mode, 70, ppd), 64, 48, OPTICS)
    nonzero = np.ones(young.shape, bool)
    nonzero[0, 0] = False
    assert np.all(old[nonzero] <= young[nonzero])


def test_off_mode_has_no_filter():
    with pytest.raises(OpticsError):
        build_glare_filter(OpticsConfig("off", 24, 60), 8, 8, OPTICS)
    rad = _radiance(np.ones((4, 4)))
    assert apply_glare(rad, None) is rad


@pytest.mark.parametrize("mode", ["mtf", "cie99"])
def test_uniform_field_unchanged(mode):
    filt = build_glare_filter(OpticsConfig(mode, 40, 60), 20, 16, OPTICS)
    out = apply_glare(_radiance(np.full((16, 20), 37.0)), filt)
    np.testing.assert_allclose(out.luminance, 37.0, rtol=1e-12)


@pytest.mark.parametrize("mode", ["mtf", "cie99"])
def test_mean_preserved(mode):
    rng = np.random.default_rng(5)
    lum = np.exp(rng.normal(3, 2, (48, 80)))
    filt = build_glare_filter(OpticsConfig(mode, 60, 45), 80, 48, OPTICS)
    out = apply_glare(_radiance(lum), filt)
    assert abs(out.luminance.mean() / lum.mean() - 1) <= 1e-6
    np.testing.assert_allclose(out.linear_rgb[..., 1], out.luminance, rtol=1e-12)


def _direct_mirrored_convolution(img, kernel):
    # spatial-domain oracle: convolve the (2H x 2W) symmetric extension with
    # the periodic kernel by explicit shifted sums over non-zero sources
    h, w = img.shape
    ext = np.pad(img, ((0, h), (0, w)), mode="symmetric")
    out = np.zeros_like(ext)
    for sy, sx in zip(*np.nonzero(ext)):
        out += ext[sy, sx] * np.roll(np.roll(kernel, sy, axis=0), sx, axis=1)
    return out[:h, :w]


@pytest.mark.parametrize("mode", ["mtf", "cie99"])
def test_bright_pixel_spreads(mode):
    img = np.zeros((64, 64))
    img[20, 37] = 1000.0
    filt = build_glare_filter(OpticsConfig(mode, 24, 60), 64, 64, OPTICS)
    out = apply_glare(_radiance(img), filt).luminance
    kernel = np.fft.ifft2(filt).real
    oracle = _direct_mirrored_convolution(img, kernel)
    np.testing.assert_allclose(out, oracle, atol=1e-9 * img.max())
    assert out.max() < img.max()
    assert abs(out.sum() / img.sum() - 1) <= 1e-6
    assert np.count_nonzero(out > 1e-6) > 1


def test_pupil_oracle_value():
    # Watson & Yellott unified formula, 60 deg binocular field, evaluated by hand
    area = math.pi * 30**2
    f = (10 * area / 846) ** 0.41
    d_sd = 7.75 - 5.75 * f / (f + 2)
    expected = d_sd + (30 - 28.58) * (0.02132 - 0.009562 * d_sd)
    assert expected == pytest.approx(3.8282094157806714, rel=1e-12)
    assert pupil_diameter(10.0, 30.0) == pytest.approx(expected, rel=1e-12)


def test_pupil_limits_and_monotonicity():
    L = np.logspace(-4, 8, 200)
    for age in (10, 24, 45, 70, 90):
        d = pupil_diameter(L, age)
        assert np.all((d >= 2) & (d <= 9))
        assert np.all(np.diff(d) <= 0)
    assert pupil_diameter(1e12, 24) == pytest.approx(2.0, abs=1e-3)
    ages = np.linspace(30, 90, 61)
    for lum in (0.01, 1, 100, 1e4, 1e7):
        assert np.all(np.diff(pupil_diameter(lum, ages)) <= 0)
    assert pupil_diameter(100, 70) <= pupil_diameter(100, 24)
    with pytest.raises(OpticsError):
        pupil_diameter(0.0, 30)


def test_response_equal_at_equal_operating_point():
    a = photoreceptor_response(np.array([42.0, 42.0]), np.array([42.0, 42.0]), CSF, OPTICS)
    assert a[0] == a[1]
    assert photoreceptor_response(42.0, 42.0, CSF, OPTICS) == pytest.approx(adapted_response(42.0, CSF))


def test_response_strictly_monotone_and_compressive():
    L = np.logspace(-2, 4, 1000)
    for La in (0.1, 10, 1000):
        r = photoreceptor_response(L, La, CSF, OPTICS)
        assert np.all(np.diff(r) > 0)
        assert np.all(np.diff(r, 2) <= 1e-12)


def test_response_matches_numerical_integration():
    # the adapted response integrates luminance sensitivity over log luminance
    def sensitivity(L):
        return 1.0 / (1.0 + (CSF["lum_saturation"] / L) ** CSF["lum_exponent"])

    def oracle(L):
        val, _ = integrate.quad(lambda x: sensitivity(math.exp(x)), math.log(1e-14), math.log(L), limit=400)
        return val

    L = np.logspace(-2, 4, 60)
    expected = np.array([oracle(x) for x in L])
    got = photoreceptor_response(L, L, CSF, OPTICS)
    np.testing.assert_allclose(got, expected, rtol=0.02)


def test_response_rejects_non_positive():
    with pytest.raises(OpticsError):
        photoreceptor_response(0.0, 1.0, CSF, OPTICS)


def test_local_adaptation_uniform():
    np.testing.assert_allclose(local_adaptation(np.full((30, 40), 50.0), 10), 50.0, rtol=1e-12)


def _checkerboard(n, lo, hi):
    y, x = np.mgrid[:n, :n]
    return np.where((x + y) % 2 == 0, lo, hi).astype(float)


def _direct_adaptation(lum, sigma):
    # weighted geometric mean with an explicit Gaussian kernel and mirror padding
    r = int(math.ceil(5 * sigma))
    t = np.arange(-r, r + 1)
    g = np.exp(-(t**2) / (2 * sigma**2))
    k = np.outer(g, g)
    k /= k.sum()
    padded = np.pad(np.log(lum), r, mode="symmetric")
    h, w = lum.shape
    out = np.empty_like(lum)
    for y in range(h):
        for x in range(w):
            out[y, x] = np.sum(padded[y : y + 2 * r + 1, x : x + 2 * r + 1] * k)
    return np.exp(out)


def test_local_adaptation_checkerboard_is_geometric_mean():
    lum = _checkerboard(32, 10.0, 1000.0)
    la = local_adaptation(lum, ppd=4, sigma_deg=1.0)
    oracle = _direct_adaptation(lum, 4.0)
    np.testing.assert_allclose(oracle[8:-8, 8:-8], 100.0, rtol=1e-3)
    np.testing.assert_allclose(la[8:-8, 8:-8], 100.0, rtol=1e-3)


def test_local_adaptation_matches_direct_sum():
    rng = np.random.default_rng(2)
    lum = np.exp(rng.normal(2, 1.5, (24, 20)))
    np.testing.assert_allclose(local_adaptation(lum, ppd=3, sigma_deg=1.0), _direct_adaptation(lum, 3.0), rtol=2e-3)


def test_local_adaptation_bounds_and_delta_limit():
    rng = np.random.default_rng(7)
    lum = np.exp(rng.normal(0, 3, (20, 20)))
    la = local_adaptation(lum, 30)
    assert la.min() >= lum.min() and la.max() <= lum.max()
    np.testing.assert_array_equal(local_adaptation(lum, 30, sigma_deg=0.0), lum)


def test_optics_config_validation():
    with pytest.raises(OpticsError):
        OpticsConfig("blur", 24, 60)
    with pytest.raises(OpticsError):
        OpticsConfig("mtf", -1, 60)
    with pytest.raises(OpticsError):
        OpticsConfig("mtf", 24, 0)
