"""Contrast sensitivity and contrast masking.

Band coefficients are first scaled by the contrast sensitivity at the
band's peak frequency and the local adapting luminance, which puts them in
threshold units (1.0 = one detection threshold). They then pass through a
divisive-normalisation transducer

    r(c, m) = sign(c) |c|^p / (sigma^q + m^q)^gamma

where the masking activity ``m`` pools coefficient magnitudes of the same
band, the other orientations of the same scale and the same orientation at
adjacent scales.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .pyramid import BandPyramid


class MaskingError(ValueError):
    pass


def resample(plane, shape):
    """Bilinear resize of a 2-D plane to ``shape`` (pixel-edge aligned)."""
    plane = np.asarray(plane, dtype=np.float64)
    shape = tuple(shape)
    if plane.shape == shape:
        return plane
    zoom = (shape[0] / plane.shape[0], shape[1] / plane.shape[1])
    out = ndimage.zoom(plane, zoom, order=1, mode="nearest", grid_mode=True)
    if out.shape != shape:  # pragma: no cover - rounding guard
        raise MaskingError(f"resample produced {out.shape}, wanted {shape}")
    return out


def csf_sensitivity(frequency, adaptation_luminance, params):
    """Contrast sensitivity at ``frequency`` (cycles/degree) and luminance (cd/m^2).

    A band-pass curve peaking at ``peak_frequency`` with power-law flanks,
    scaled by the luminance-dependent peak sensitivity. Both the peak
    sensitivity and the peak frequency fall at low luminance.
    """
    f = np.asarray(frequency, dtype=np.float64)
    L = np.asarray(adaptation_luminance, dtype=np.float64)
    if np.any(f <= 0) or np.any(L <= 0):
        raise MaskingError("frequency and luminance must be > 0")
    lum = 1.0 / (1.0 + (params["lum_saturation"] / L) ** params["lum_exponent"])
    f_peak = params["peak_frequency"] * lum ** params["peak_freq_lum_exponent"]
    a = params["low_freq_slope"]
    b = params["high_freq_slope"]
    x = f / f_peak
    shape = x**a * (1.0 + a / b) / (1.0 + (a / b) * x ** (a + b))
    return params["peak_sensitivity"] * lum * shape


def normalize_by_csf(pyramid: BandPyramid, adaptation, params) -> BandPyramid:
    """Scale coefficients to threshold units.

    Each level is multiplied by the sensitivity at its peak frequency and
    the adapting luminance resampled to its resolution, and divided by the
    level's amplitude gain so the result is independent of decimation.
    """
    adaptation = np.asarray(adaptation, dtype=np.float64)
    if adaptation.shape != tuple(pyramid.shape):
        raise MaskingError(
            f"adaptation plane {adaptation.shape} does not match pyramid {tuple(pyramid.shape)}"
        )
    log_la = np.log(adaptation)

    def scale(shape, freq, gain):
        la = np.exp(resample(log_la, shape))
        return csf_sensitivity(freq, la, params) / gain

    bands = []
    for lvl, planes in enumerate(pyramid.bands):
        s = scale(planes[0].shape, pyramid.peak_frequency[lvl], pyramid.gains[lvl])
        bands.append([b * s for b in planes])
    s = scale(pyramid.residual.shape, pyramid.residual_frequency, pyramid.residual_gain)
    return pyramid.with_planes(bands, pyramid.residual * s)


def masking_transducer(c, c_mask, params):
    c = np.asarray(c, dtype=np.float64)
    c_mask = np.asarray(c_mask, dtype=np.float64)
    if np.any(c_mask < 0):
        raise MaskingError("masking activity must be >= 0")
    p, q, g, s = params["p"], params["q"], params["gamma"], params["sigma"]
    return np.sign(c) * np.abs(c) ** p / (s**q + c_mask**q) ** g


def transducer_derivative(c, c_mask, params):
    """d r / d c of :func:`masking_transducer` (``c != 0`` when p < 1)."""
    c = np.asarray(c, dtype=np.float64)
    p, q, g, s = params["p"], params["q"], params["gamma"], params["sigma"]
    return p * np.abs(c) ** (p - 1.0) / (s**q + np.asarray(c_mask, dtype=np.float64) ** q) ** g


def masking_activity(pyramid: BandPyramid, band, params):
    """Pooled masking activity for ``band = (level, orientation)``.

    The residual is not a masker and receives no activity.
    """
    try:
        lvl, k = band
        plane = pyramid.bands[lvl][k]
    except (TypeError, ValueError, IndexError):
        raise MaskingError(f"invalid band index {band!r}") from None
    if lvl < 0 or k < 0:
        raise MaskingError(f"invalid band index {band!r}")

    act = params["self_weight"] * np.abs(plane)
    w_o = params["orientation_weight"]
    if w_o:
        for j, other in enumerate(pyramid.bands[lvl]):
            if j != k:
                act = act + w_o * np.abs(other)
    w_s = params["scale_weight"]
    if w_s:
        for adj in (lvl - 1, lvl + 1):
            if 0 <= adj < pyramid.levels:
                act = act + w_s * resample(np.abs(pyramid.bands[adj][k]), plane.shape)
    return ndimage.gaussian_filter(act, params["pool_sigma"], mode="reflect")


def _activities(pyr, params):
    return [[masking_activity(pyr, (lvl, k), params) for k in range(pyr.orientation_count)]
            for lvl in range(pyr.levels)]


def band_difference(test: BandPyramid, reference: BandPyramid, params):
    """Per-coefficient perceptual difference of two threshold-normalised pyramids.

    ``params`` are the masking parameters. With ``mutual = 1`` the masker
    is the smaller of the test and reference activities, which makes the
    difference exactly antisymmetric; with ``mutual = 0`` only the
    reference masks.
    """
    if test.levels != reference.levels or test.orientation_count != reference.orientation_count:
        raise MaskingError("pyramids have different structure")
    for a, b in zip(test.bands, reference.bands):
        for x, y in zip(a, b):
            if x.shape != y.shape:
                raise MaskingError("pyramid band shapes differ")
    if test.residual.shape != reference.residual.shape:
        raise MaskingError("pyramid residual shapes differ")

    act_ref = _activities(reference, params)
    if params["mutual"]:
        act_test = _activities(test, params)
        masks = [[np.minimum(a, b) for a, b in zip(la, lb)] for la, lb in zip(act_test, act_ref)]
    else:
        masks = act_ref

    bands = []
    for lvl in range(test.levels):
        row = []
        for k in range(test.orientation_count):
            m = masks[lvl][k]
            row.append(
                masking_transducer(test.bands[lvl][k], m, params)
                - masking_transducer(reference.bands[lvl][k], m, params)
            )
        bands.append(row)
    residual = masking_transducer(test.residual, 0.0, params) - masking_transducer(
        reference.residual, 0.0, params
    )
    return test.with_planes(bands, residual)


def perceptual_difference(test, reference, test_adaptation, reference_adaptation, calib):
    """CSF normalisation of both pyramids followed by :func:`band_difference`."""
    t = normalize_by_csf(test, test_adaptation, calib.csf_params)
    r = normalize_by_csf(reference, reference_adaptation, calib.csf_params)
    return band_difference(t, r, calib.masking_params)
