"""Optical and retinal pathway of the eye.

Glare is applied to the luminance plane by spectral multiplication on a
mirrored (2H x 2W) extension of the image. Because the extension is
symmetric and the filters are even, the cropped result keeps the mean of
the input exactly.

Two glare models are available: an age-dependent sum-of-exponentials MTF
and the CIE 1999 glare spread function (Vos & van den Berg). Crystalline
lens ageing is not modelled separately; it is absorbed in the age terms
of the glare models.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy import fft

from .display import RadianceMap

GLARE_MODES = ("mtf", "cie99", "off")

# Stanley & Davies / Watson & Yellott unified pupil model
_PUPIL_REF_AGE = 28.58


class OpticsError(ValueError):
    pass


@dataclass(frozen=True)
class OpticsConfig:
    glare_mode: str = "mtf"
    age: float = 24.0
    ppd: float = 60.0

    def __post_init__(self):
        if self.glare_mode not in GLARE_MODES:
            raise OpticsError(f"unknown glare mode {self.glare_mode!r}; expected one of {GLARE_MODES}")
        if self.age < 0:
            raise OpticsError("age must be >= 0")
        if not self.ppd > 0:
            raise OpticsError("ppd must be > 0")


@dataclass
class RetinalResponseMap:
    response: np.ndarray
    adaptation_luminance: np.ndarray

    @property
    def height(self) -> int:
        return self.response.shape[0]

    @property
    def width(self) -> int:
        return self.response.shape[1]


def _age_weights(age):
    a = (age / 70.0) ** 4
    return 1.0 - 0.08 * a, 1.0 + 1.6 * a


def eye_mtf(rho, age, params):
    """Optical MTF as a function of spatial frequency ``rho`` (cycles/degree).

    The first exponential is the sharp core of the point spread, the
    other two the scattered veil; ageing moves weight from the core to the
    veil using the CIE age factors. Value at rho = 0 is 1.
    """
    core, veil = _age_weights(age)
    a = np.array([params["mtf_a1"] * core, params["mtf_a2"] * veil, params["mtf_a3"] * veil])
    b = np.array([params["mtf_b1"], params["mtf_b2"], params["mtf_b3"]])
    a = a / a.sum()
    rho = np.asarray(rho, dtype=np.float64)
    return sum(ak * np.exp(-bk * rho) for ak, bk in zip(a, b))


# (coefficient, width in degrees, exponent) of the CIE 1999 GSF terms
_CIE_CORE = ((9.2e6, 0.0046, 1.5), (1.5e5, 0.045, 1.5))
_CIE_VEIL = ((400.0, 0.1, 1.0),)
_CIE_PIGMENT = ((1300.0, 0.1, 1.5), (0.8, 0.1, 0.5))


def cie99_gsf(theta, age, pigmentation=0.5):
    """CIE 1999 glare spread function in sr^-1, ``theta`` in degrees."""
    theta = np.asarray(theta, dtype=np.float64)
    core, veil = _age_weights(age)

    def terms(table):
        return sum(c / (1.0 + (theta / w) ** 2) ** e for c, w, e in table)

    return (
        core * terms(_CIE_CORE)
        + veil * (terms(_CIE_VEIL) + 3e-8 * theta**2 + pigmentation * terms(_CIE_PIGMENT))
        + 2.5e-3 * pigmentation
    )


def _disk_integral(c, w, e, R):
    # integral of c / (1 + (t/w)^2)^e over a disk of radius R (deg^2 units)
    s = 1.0 + (R / w) ** 2
    if e == 1.0:
        return np.pi * w**2 * c * np.log(s)
    return 2.0 * np.pi * w**2 * c * (1.0 - s ** (1.0 - e)) / (e - 1.0)


def _cie99_center(R, age, pigmentation):
    core, veil = _age_weights(age)

    def terms(table):
        return sum(_disk_integral(c, w, e, R) for c, w, e in table)

    return (
        core * terms(_CIE_CORE)
        + veil * (terms(_CIE_VEIL) + 3e-8 * np.pi * R**4 / 2.0 + pigmentation * terms(_CIE_PIGMENT))
        + 2.5e-3 * pigmentation * np.pi * R**2
    )


def _padded_shape(height, width):
    return 2 * height, 2 * width


@functools.lru_cache(maxsize=32)
def _glare_filter_cached(mode, age, ppd, height, width, params_items):
    params = dict(params_items)
    ph, pw = _padded_shape(height, width)
    fy = fft.fftfreq(ph)[:, None] * ppd
    fx = fft.fftfreq(pw)[None, :] * ppd
    if mode == "mtf":
        filt = eye_mtf(np.sqrt(fx**2 + fy**2), age, params)
    else:
        dy = np.minimum(np.arange(ph), ph - np.arange(ph))[:, None]
        dx = np.minimum(np.arange(pw), pw - np.arange(pw))[None, :]
        theta = np.sqrt(dx**2 + dy**2) / ppd
        pixel_area = 1.0 / ppd**2
        kernel = cie99_gsf(np.maximum(theta, 1e-12), age, params["pigmentation"]) * pixel_area
        # the central peak is far narrower than a pixel; integrate it over an equal-area disk
        kernel[0, 0] = _cie99_center(1.0 / (ppd * np.sqrt(np.pi)), age, params["pigmentation"])
        kernel /= kernel.sum()
        filt = fft.fft2(kernel, workers=-1).real
    filt[0, 0] = 1.0
    filt.setflags(write=False)
    return filt


def build_glare_filter(config: OpticsConfig, width, height, params):
    """Frequency response of the eye's glare for an image of the given size.

    The filter is laid out in FFT order on the (2*height, 2*width) grid of
    the mirrored image and has gain exactly 1 at zero frequency.
    """
    if config.glare_mode == "off":
        raise OpticsError("no glare filter exists for glare_mode='off'")
    items = tuple(sorted((k, float(v)) for k, v in params.items()))
    return _glare_filter_cached(
        config.glare_mode, float(config.age), float(config.ppd), int(height), int(width), items
    )


def _convolve_mirrored(plane, filt):
    # filt is even, so its right half is all the real FFT needs
    h, w = plane.shape
    ext = np.pad(plane, ((0, h), (0, w)), mode="symmetric")
    spec = fft.rfft2(ext, workers=-1) * filt[:, : w + 1]
    return fft.irfft2(spec, s=ext.shape, workers=-1)[:h, :w]


def apply_glare(radiance: RadianceMap, filt) -> RadianceMap:
    """Blur a radiance map with a glare filter; ``filt=None`` passes it through."""
    if filt is None:
        return radiance
    h, w = radiance.luminance.shape
    if filt.shape != _padded_shape(h, w):
        raise OpticsError(f"filter shape {filt.shape} does not match image {h}x{w}")
    rgb = np.stack([_convolve_mirrored(radiance.linear_rgb[..., c], filt) for c in range(3)], -1)
    return RadianceMap(linear_rgb=rgb, luminance=_convolve_mirrored(radiance.luminance, filt))


def glare_luminance(luminance, filt):
    """Glare applied to a luminance plane only."""
    h, w = luminance.shape
    if filt.shape != _padded_shape(h, w):
        raise OpticsError(f"filter shape {filt.shape} does not match image {h}x{w}")
    return _convolve_mirrored(luminance, filt)


def pupil_diameter(luminance, age, field_deg=60.0):
    """Pupil diameter in mm for a field of the given luminance and diameter.

    Unified formula of Watson & Yellott (2012) for binocular viewing. The
    age term is clipped so the diameter never grows with age (at very high
    luminance the published slope changes sign by a negligible amount).
    """
    luminance = np.asarray(luminance, dtype=np.float64)
    if np.any(luminance <= 0):
        raise OpticsError("adapting luminance must be > 0")
    area = np.pi * (field_deg / 2.0) ** 2
    f = (luminance * area / 846.0) ** 0.41
    d_sd = 7.75 - 5.75 * f / (f + 2.0)
    slope = np.minimum(0.02132 - 0.009562 * d_sd, 0.0)
    return np.clip(d_sd + (age - _PUPIL_REF_AGE) * slope, 2.0, 9.0)


def pupil_gain(adapting_luminance, age, params):
    """Retinal illuminance of an observer of ``age`` relative to the reference observer."""
    d = pupil_diameter(adapting_luminance, age, params["pupil_field_deg"])
    d_ref = pupil_diameter(adapting_luminance, params["pupil_reference_age"], params["pupil_field_deg"])
    return (d / d_ref) ** 2


def luminance_sensitivity(L, csf_params):
    """Relative peak sensitivity at luminance ``L``; tends to 1 at photopic levels."""
    L = np.asarray(L, dtype=np.float64)
    a = csf_params["lum_exponent"]
    return 1.0 / (1.0 + (csf_params["lum_saturation"] / L) ** a)


def adapted_response(L, csf_params):
    """Response of an eye fully adapted to ``L``.

    This is the integral of :func:`luminance_sensitivity` over log
    luminance from 0, so one unit of response is one unit of log contrast
    at photopic levels and less in the de Vries-Rose range.
    """
    L = np.asarray(L, dtype=np.float64)
    a = csf_params["lum_exponent"]
    return np.log1p((L / csf_params["lum_saturation"]) ** a) / a


def _log_cosh(z):
    z = np.abs(z)
    return z + np.log1p(np.exp(-2.0 * z)) - np.log(2.0)


def photoreceptor_response(L, La, csf_params, optics_params):
    """Photoreceptor response to luminance ``L`` when adapted to ``La``.

    Around the adaptation point the response grows like log luminance
    (unit slope). Away from it the slope changes smoothly from
    ``1 + m`` (darker) to ``1 - m`` (brighter), ``m`` being
    ``response_compression``, so the curve is concave in log luminance.
    """
    L = np.asarray(L, dtype=np.float64)
    La = np.asarray(La, dtype=np.float64)
    if np.any(L <= 0) or np.any(La <= 0):
        raise OpticsError("luminance and adaptation luminance must be > 0")
    m = optics_params["response_compression"]
    k = optics_params["response_knee"]
    x = np.log(L / La)
    return adapted_response(La, csf_params) + x - (2.0 * m / k) * _log_cosh(k * x / 2.0)


def local_adaptation(luminance, ppd, sigma_deg=1.0):
    """Adapting luminance as a Gaussian-weighted geometric mean of the neighbourhood."""
    luminance = np.asarray(luminance, dtype=np.float64)
    if np.any(luminance <= 0):
        raise OpticsError("luminance must be > 0")
    sigma = sigma_deg * ppd
    if sigma <= 0:
        return luminance.copy()
    la = np.exp(_convolve_mirrored(np.log(luminance), _gaussian_transfer(*luminance.shape, sigma)))
    return np.clip(la, luminance.min(), luminance.max())


@functools.lru_cache(maxsize=16)
def _gaussian_transfer(height, width, sigma):
    ph, pw = _padded_shape(height, width)
    fy = fft.fftfreq(ph)[:, None]
    fx = fft.fftfreq(pw)[None, :]
    g = np.exp(-2.0 * np.pi**2 * sigma**2 * (fx**2 + fy**2))
    g.setflags(write=False)
    return g


def retinal_response(radiance: RadianceMap, config: OpticsConfig, calib) -> RetinalResponseMap:
    """Glare, pupil, local adaptation and photoreceptor response in one pass."""
    optics = calib.optics_params
    lum = radiance.luminance
    if config.glare_mode != "off":
        lum = glare_luminance(lum, build_glare_filter(config, radiance.width, radiance.height, optics))
    lum = np.maximum(lum, 1e-6)
    lum = lum * pupil_gain(np.exp(np.log(lum).mean()), config.age, optics)
    la = local_adaptation(lum, config.ppd, optics["adaptation_sigma_deg"])
    resp = photoreceptor_response(lum, la, calib.csf_params, optics)
    return RetinalResponseMap(response=resp, adaptation_luminance=la)
