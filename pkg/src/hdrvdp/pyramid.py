"""Multi-scale, multi-orientation band decomposition.

The decomposition is computed in the Fourier domain with unitary FFTs.
At every level the spectrum is split by a radial high-pass ``hi`` and
low-pass ``lo`` with ``hi**2 + lo**2 = 1``; the high-pass part is further
split into orientation bands by angular windows whose squares sum to 1.
The low-pass part vanishes above half the level's Nyquist frequency and is
decimated by cropping the spectrum. All filters are real and even, so the
bands are real, and the whole transform is a Parseval tight frame:
reconstruction is the adjoint of decomposition.

Angular windows are raised-cosine bumps centred on ``pi * k / K`` that
reach 1 at their centre, so a grating aligned with an orientation lands
entirely in that orientation's band. Boundaries are periodic.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import fft

MIN_PEAK_CPD = 0.25


class PyramidError(ValueError):
    pass


def band_frequencies(ppd, levels):
    """Nominal peak frequency (cycles/degree) of each level, finest first."""
    if not ppd > 0:
        raise PyramidError("ppd must be > 0")
    nyquist = ppd / 2.0
    return [nyquist / 2.0 ** (lvl + 1) for lvl in range(levels)]


def default_levels(height, width, ppd):
    levels = int(math.floor(math.log2(min(height, width)))) - 2
    freqs = band_frequencies(ppd, max(levels, 0))
    return sum(1 for f in freqs if f >= MIN_PEAK_CPD)


def _smooth_step(t):
    # 0 -> 0, 1 -> 1, flat at both ends, and s(t) + s(1 - t) = 1
    t = np.clip(t, 0.0, 1.0)
    return t - np.sin(2.0 * np.pi * t) / (2.0 * np.pi)


def _grid(shape):
    wy = 2.0 * np.pi * fft.fftfreq(shape[0])[:, None]
    wx = 2.0 * np.pi * fft.fftfreq(shape[1])[None, :]
    return wy, wx


def _radial(shape):
    wy, wx = _grid(shape)
    r = np.sqrt(wx**2 + wy**2)
    with np.errstate(divide="ignore"):
        t = np.log2(np.maximum(r, 1e-300) / (np.pi / 4.0))
    angle = 0.5 * np.pi * _smooth_step(t)
    hi = np.sin(angle)
    lo = np.cos(angle)
    hi[r >= np.pi / 2.0] = 1.0
    lo[r >= np.pi / 2.0] = 0.0
    hi[r <= np.pi / 4.0] = 0.0
    lo[r <= np.pi / 4.0] = 1.0
    return hi, lo


def _angular_window(theta, k, K):
    if K == 1:
        return np.ones_like(theta)
    spacing = np.pi / K
    d = np.abs(np.mod(theta - k * spacing + np.pi / 2.0, np.pi) - np.pi / 2.0)
    return np.where(d < spacing, np.cos(0.5 * np.pi * _smooth_step(d / spacing)), 0.0)


@functools.lru_cache(maxsize=64)
def level_filters(shape, orientations):
    """Return ``(bands, lo)``: the oriented band filters and low-pass of one level.

    ``bands[k] ** 2`` summed over ``k`` plus ``lo ** 2`` is exactly 1.
    """
    wy, wx = _grid(shape)
    theta = np.arctan2(wy, wx)
    hi, lo = _radial(shape)
    windows = [_angular_window(theta, k, orientations) for k in range(orientations)]

    # At the Nyquist row/column of even-sized grids a bin is its own mirror
    # image, so the window must equal its value at the reflected angle.
    # Averaging squared windows over the reflection keeps the sum at 1.
    nyq = np.zeros(shape, dtype=bool)
    if shape[0] % 2 == 0:
        nyq[shape[0] // 2, :] = True
    if shape[1] % 2 == 0:
        nyq[:, shape[1] // 2] = True
    if nyq.any():
        flipped = [_angular_window(-theta, k, orientations) for k in range(orientations)]
        for k in range(orientations):
            sym = np.sqrt(0.5 * (windows[k] ** 2 + flipped[k] ** 2))
            windows[k] = np.where(nyq, sym, windows[k])

    bands = tuple(hi * w for w in windows)
    for b in bands:
        b.setflags(write=False)
    lo.setflags(write=False)
    return bands, lo


def _child_shape(shape):
    return tuple(-(-n // 2) for n in shape)


def _child_index(n, m):
    # parent FFT indices of the child's frequencies
    f = fft.fftfreq(m) * m
    return np.mod(np.round(f).astype(np.intp), n)


def _crop(X, child):
    iy = _child_index(X.shape[0], child[0])
    ix = _child_index(X.shape[1], child[1])
    return X[np.ix_(iy, ix)]


def _uncrop(Xc, parent):
    out = np.zeros(parent, dtype=complex)
    iy = _child_index(parent[0], Xc.shape[0])
    ix = _child_index(parent[1], Xc.shape[1])
    out[np.ix_(iy, ix)] = Xc
    return out


@dataclass
class BandPyramid:
    """Band coefficients, finest level first.

    ``bands[level][k]`` is the plane of orientation ``k`` (angle
    ``pi * k / K`` of the frequency vector from the horizontal axis).
    ``gains[level]`` is the factor by which a sinusoid's amplitude grows
    when it is represented at that level's resolution; dividing by it
    returns coefficients to the contrast units of the input.
    """

    bands: list
    residual: np.ndarray
    shape: tuple
    ppd: float
    orientation_count: int
    peak_frequency: list = field(default_factory=list)
    gains: list = field(default_factory=list)
    residual_gain: float = 1.0

    @property
    def levels(self) -> int:
        return len(self.bands)

    @property
    def band_count(self) -> int:
        return self.levels * self.orientation_count + 1

    @property
    def residual_frequency(self) -> float:
        return self.peak_frequency[-1] / 2.0

    def band_indices(self):
        return [(lvl, k) for lvl in range(self.levels) for k in range(self.orientation_count)]

    def with_planes(self, bands, residual):
        """Same geometry, new coefficient planes."""
        return BandPyramid(
            bands=bands,
            residual=residual,
            shape=self.shape,
            ppd=self.ppd,
            orientation_count=self.orientation_count,
            peak_frequency=list(self.peak_frequency),
            gains=list(self.gains),
            residual_gain=self.residual_gain,
        )

    def map(self, fn):
        """Apply ``fn(plane)`` to every band plane and the residual."""
        return self.with_planes([[fn(b) for b in lvl] for lvl in self.bands], fn(self.residual))

    def energy(self) -> float:
        total = sum(float(np.sum(b**2)) for lvl in self.bands for b in lvl)
        return total + float(np.sum(self.residual**2))


def decompose(image, ppd, orientation_count=4, levels=None) -> BandPyramid:
    """Split ``image`` into ``levels * orientation_count`` bands plus a low-pass residual."""
    image = np.asarray(getattr(image, "response", image), dtype=np.float64)
    if image.ndim != 2:
        raise PyramidError("expected a 2-D image")
    if orientation_count < 1:
        raise PyramidError("orientation_count must be >= 1")
    h, w = image.shape
    if levels is None:
        levels = default_levels(h, w, ppd)
    if levels < 1 or min(h, w) < 2**levels:
        raise PyramidError(f"image {h}x{w} is too small for {max(levels, 1)} pyramid level(s)")

    X = fft.fft2(image, norm="ortho", workers=-1)
    bands, gains = [], []
    for _ in range(levels):
        filters, lo = level_filters(X.shape, orientation_count)
        half = X.shape[1] // 2 + 1
        Xh = X[:, :half]
        bands.append(
            [fft.irfft2(Xh * f[:, :half], s=X.shape, norm="ortho", workers=-1) for f in filters]
        )
        gains.append(math.sqrt(h * w / (X.shape[0] * X.shape[1])))
        X = _crop(X * lo, _child_shape(X.shape))
    residual = fft.ifft2(X, norm="ortho", workers=-1).real
    return BandPyramid(
        bands=bands,
        residual=residual,
        shape=(h, w),
        ppd=float(ppd),
        orientation_count=orientation_count,
        peak_frequency=band_frequencies(ppd, levels),
        gains=gains,
        residual_gain=math.sqrt(h * w / residual.size),
    )


def reconstruct(pyramid: BandPyramid) -> np.ndarray:
    """Invert :func:`decompose` (the adjoint of the tight frame)."""
    shapes = [tuple(pyramid.shape)]
    for _ in range(pyramid.levels):
        shapes.append(_child_shape(shapes[-1]))
    if pyramid.residual.shape != shapes[-1]:
        raise PyramidError("residual shape does not match the pyramid geometry")

    X = fft.fft2(pyramid.residual, norm="ortho", workers=-1)
    for lvl in reversed(range(pyramid.levels)):
        shape = shapes[lvl]
        planes = pyramid.bands[lvl]
        if len(planes) != pyramid.orientation_count or any(p.shape != shape for p in planes):
            raise PyramidError(f"malformed pyramid at level {lvl}")
        filters, lo = level_filters(shape, pyramid.orientation_count)
        X = _uncrop(X, shape) * lo
        for plane, f in zip(planes, filters):
            X += fft.fft2(plane, norm="ortho", workers=-1) * f
    return fft.ifft2(X, norm="ortho", workers=-1).real
