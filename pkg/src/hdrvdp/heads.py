"""Prediction heads: visibility, detection, quality (JOD) and contrast distortion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .csf import resample
from .pyramid import BandPyramid

MAX_JOD = 10.0


@dataclass
class CivdmResult:
    """Per-pixel probabilities that contrast was lost, amplified or reversed."""

    loss_map: np.ndarray
    amplification_map: np.ndarray
    reversal_map: np.ndarray

    def as_dict(self):
        return {
            "loss": self.loss_map,
            "amplification": self.amplification_map,
            "reversal": self.reversal_map,
        }


def psychometric(D, params):
    """Weibull detection probability ``1 - exp(-(|D|/alpha)^beta)``."""
    D = np.abs(np.asarray(D, dtype=np.float64))
    return 1.0 - np.exp(-((D / params["alpha"]) ** params["beta"]))


def probability_summation(planes):
    """Combine independent detection probabilities: ``1 - prod(1 - P)``."""
    miss = None
    for p in planes:
        miss = (1.0 - p) if miss is None else miss * (1.0 - p)
    if miss is None:
        raise ValueError("no probability planes to combine")
    return 1.0 - miss


def _all_planes(pyr: BandPyramid, include_residual=True):
    planes = [b for lvl in pyr.bands for b in lvl]
    if include_residual:
        planes.append(pyr.residual)
    return planes


def visibility_map(diff: BandPyramid, params):
    """Probability of noticing the difference at each pixel."""
    shape = tuple(diff.shape)
    per_band = (np.clip(resample(psychometric(d, params), shape), 0.0, 1.0) for d in _all_planes(diff))
    return probability_summation(per_band)


def detection_probability(diff: BandPyramid, params, spatial_max=True):
    """Single probability of telling the two images apart.

    The spatial maximum of the visibility map by default; with
    ``spatial_max=False`` all pixels are combined by probability summation.
    """
    vis = visibility_map(diff, params)
    if spatial_max:
        return float(vis.max())
    return float(1.0 - np.prod(1.0 - vis))


def pooled_distortion(diff: BandPyramid, pooling):
    """Minkowski pool ``(sum_b w_b * mean |D_b|^kappa)^(1/kappa)``."""
    kappa = pooling["kappa"]
    w = pooling["band_weight"]
    total = sum(w * float(np.mean(np.abs(d) ** kappa)) for d in _all_planes(diff))
    return total ** (1.0 / kappa)


def jod_from_distortion(E, regression):
    return MAX_JOD - regression["a"] * np.log1p(regression["b"] * E)


def quality_jod(diff: BandPyramid, pooling, regression) -> float:
    return float(jod_from_distortion(pooled_distortion(diff, pooling), regression))


def civdm(test: BandPyramid, reference: BandPyramid, params) -> CivdmResult:
    """Contrast loss / amplification / reversal maps.

    ``test`` and ``reference`` are threshold-normalised band pyramids. For
    each coefficient the visibility of the contrast in either image is
    ``psychometric(c)``; loss is ``max(P_ref - P_test, 0)``,
    amplification ``max(P_test - P_ref, 0)`` and reversal
    ``min(P_ref, P_test)`` where the coefficient changes sign. Bands are
    combined by probability summation; the low-pass residual carries no
    contrast and is skipped.
    """
    shape = tuple(reference.shape)
    t_planes = _all_planes(test, include_residual=False)
    r_planes = _all_planes(reference, include_residual=False)
    if len(t_planes) != len(r_planes) or any(a.shape != b.shape for a, b in zip(t_planes, r_planes)):
        raise ValueError("test and reference pyramids have different shapes")

    loss, amp, rev = [], [], []
    for ct, cr in zip(t_planes, r_planes):
        pt = psychometric(ct, params)
        pr = psychometric(cr, params)
        flipped = np.sign(ct) * np.sign(cr) < 0
        loss.append(np.clip(resample(np.maximum(pr - pt, 0.0), shape), 0.0, 1.0))
        amp.append(np.clip(resample(np.maximum(pt - pr, 0.0), shape), 0.0, 1.0))
        rev.append(np.clip(resample(np.where(flipped, np.minimum(pr, pt), 0.0), shape), 0.0, 1.0))
    return CivdmResult(
        loss_map=probability_summation(loss),
        amplification_map=probability_summation(amp),
        reversal_map=probability_summation(rev),
    )
