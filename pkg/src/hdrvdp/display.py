"""Display model: display-encoded pixel values to absolute linear light.

The emitted light of a display is modelled as the EOTF of the encoded
signal plus the light reflected off the screen from the room::

    L = EOTF(I) + E_amb * k_refl / pi

The reflected term is added to every linear channel, so a black frame
still carries a small positive floor and downstream logarithms are safe.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

# SMPTE ST 2084 constants
PQ_M1 = 2610.0 / 16384.0
PQ_M2 = 2523.0 / 4096.0 * 128.0
PQ_C1 = 3424.0 / 4096.0
PQ_C2 = 2413.0 / 4096.0 * 32.0
PQ_C3 = 2392.0 / 4096.0 * 32.0
PQ_PEAK = 10000.0

# Luminance weights (row Y of the RGB->XYZ matrix) per set of primaries.
LUMINANCE_WEIGHTS = {
    "bt2020": (0.2627, 0.6780, 0.0593),
    "srgb": (0.2126, 0.7152, 0.0722),
}

EOTFS = ("pq", "gamma22_srgb")

# encoding tag of an input frame -> EOTF that decodes it
_ENCODING_FOR_EOTF = {"pq": "pq", "gamma22_srgb": "srgb"}


class DisplayModelError(ValueError):
    pass


@dataclass(frozen=True)
class DisplayParams:
    """Photometric description of the display and the viewing room.

    ``peak_luminance`` and ``black_level`` are only used by the gamma
    EOTF; PQ is absolute. ``ambient`` is the illuminance falling on the
    screen in lux and ``reflectivity`` the fraction of it reflected.
    """

    eotf: str = "pq"
    peak_luminance: float = 100.0
    black_level: float = 0.0
    ambient: float = 200.0
    reflectivity: float = 0.005
    primaries: str = "bt2020"
    strict: bool = False

    def __post_init__(self):
        if self.eotf not in EOTFS:
            raise DisplayModelError(f"unknown EOTF {self.eotf!r}; expected one of {EOTFS}")
        if self.primaries not in LUMINANCE_WEIGHTS:
            raise DisplayModelError(f"unknown primaries {self.primaries!r}")
        if self.ambient < 0:
            raise DisplayModelError("ambient illuminance must be >= 0")
        if not 0.0 <= self.reflectivity <= 1.0:
            raise DisplayModelError("reflectivity must lie in [0, 1]")
        if not self.peak_luminance > self.black_level >= 0:
            raise DisplayModelError("need peak_luminance > black_level >= 0")

    @property
    def ambient_floor(self) -> float:
        """Luminance reflected off the screen, cd/m^2."""
        return self.ambient * self.reflectivity / np.pi


@dataclass
class RadianceMap:
    linear_rgb: np.ndarray
    luminance: np.ndarray

    @property
    def height(self) -> int:
        return self.luminance.shape[0]

    @property
    def width(self) -> int:
        return self.luminance.shape[1]


def _check_range(x, lo, hi, strict, what):
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < lo) or np.any(x > hi):
        if strict:
            raise DisplayModelError(f"{what} outside [{lo}, {hi}]")
        warnings.warn(f"{what} outside [{lo}, {hi}]; clamping", RuntimeWarning, stacklevel=3)
        x = np.clip(x, lo, hi)
    return x


def pq_inverse_eotf(V, strict=False):
    """Decode PQ signal values in [0, 1] to luminance in cd/m^2."""
    V = _check_range(V, 0.0, 1.0, strict, "PQ signal")
    Vp = V ** (1.0 / PQ_M2)
    num = np.maximum(Vp - PQ_C1, 0.0)
    den = PQ_C2 - PQ_C3 * Vp
    return PQ_PEAK * (num / den) ** (1.0 / PQ_M1)


def pq_eotf_inverse_check(L):
    """Encode luminance in cd/m^2 to a PQ signal value (the ST 2084 forward curve)."""
    L = np.asarray(L, dtype=np.float64)
    if np.any(L < 0) or np.any(L > PQ_PEAK):
        raise DisplayModelError(f"luminance outside [0, {PQ_PEAK}]")
    Y = (L / PQ_PEAK) ** PQ_M1
    V = ((PQ_C1 + PQ_C2 * Y) / (1.0 + PQ_C3 * Y)) ** PQ_M2
    # the curve gives c1**m2 ~ 7e-7 at zero; that decodes to 0 anyway
    return np.where(L > 0, V, 0.0)


def srgb_eotf(V, strict=False):
    """Piecewise sRGB decoding to relative linear values in [0, 1]."""
    V = _check_range(V, 0.0, 1.0, strict, "sRGB signal")
    return np.where(V <= 0.04045, V / 12.92, ((V + 0.055) / 1.055) ** 2.4)


def rgb_to_luminance(linear_rgb, primaries="bt2020"):
    try:
        w = LUMINANCE_WEIGHTS[primaries]
    except KeyError:
        raise DisplayModelError(f"unknown primaries {primaries!r}") from None
    rgb = np.asarray(linear_rgb, dtype=np.float64)
    return w[0] * rgb[..., 0] + w[1] * rgb[..., 1] + w[2] * rgb[..., 2]


def apply_display_model(frame, params: DisplayParams) -> RadianceMap:
    """Convert a :class:`~hdrvdp.imgio.DisplayEncodedFrame` to a :class:`RadianceMap`.

    Frames tagged ``linear`` (OpenEXR input) already hold absolute
    cd/m^2 values; the EOTF is skipped but the reflected ambient light
    is still added.
    """
    if frame.encoding == "linear":
        linear = np.asarray(frame.data, dtype=np.float64)
        if np.any(linear < 0) or not np.all(np.isfinite(linear)):
            raise DisplayModelError("linear frame must hold finite non-negative values")
    else:
        expected = _ENCODING_FOR_EOTF[params.eotf]
        if frame.encoding != expected:
            raise DisplayModelError(
                f"frame encoded as {frame.encoding!r} but display EOTF is {params.eotf!r}"
            )
        if params.eotf == "pq":
            linear = pq_inverse_eotf(frame.data, strict=params.strict)
        else:
            rel = srgb_eotf(frame.data, strict=params.strict)
            linear = params.black_level + (params.peak_luminance - params.black_level) * rel

    linear = linear + params.ambient_floor
    return RadianceMap(linear_rgb=linear, luminance=rgb_to_luminance(linear, params.primaries))
