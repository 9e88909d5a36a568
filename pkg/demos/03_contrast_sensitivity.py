"""The model's contrast sensitivity, measured like a psychophysics experiment.

For Gabor patches on a 100 cd/m^2 background the detection head is
bisected to the contrast that gives a 50% detection probability. The
inverse of that threshold traces a band-pass sensitivity curve that falls
at both low and high spatial frequencies. Takes about a minute.

    python demos/03_contrast_sensitivity.py
"""

import numpy as np

from hdrvdp import RunConfig, default_calibration, run_task
from hdrvdp.display import pq_eotf_inverse_check
from hdrvdp.imgio import DisplayEncodedFrame

ppd, n = 60, 256
yy, xx = (np.mgrid[:n, :n] - n / 2) / ppd
envelope = np.exp(-(xx**2 + yy**2) / (2 * 0.5**2))
cfg = RunConfig(task="detection", ppd=ppd)
calib = default_calibration("detection")


def frame(lum):
    return DisplayEncodedFrame(pq_eotf_inverse_check(np.repeat(lum[..., None], 3, -1)), "pq")


def p_detect(freq, contrast, background):
    gabor = background * (1 + contrast * np.cos(2 * np.pi * freq * xx) * envelope)
    return run_task(frame(gabor), frame(np.full((n, n), background)), cfg, calib).score


def threshold(freq, background=100.0):
    lo, hi = 1e-4, 0.9
    for _ in range(16):
        mid = np.sqrt(lo * hi)
        lo, hi = (mid, hi) if p_detect(freq, mid, background) < 0.5 else (lo, mid)
    return np.sqrt(lo * hi)


print("  cpd   threshold   sensitivity")
for f in (1, 2, 4, 8, 16, 24):
    t = threshold(f)
    print(f"{f:5d}   {t:9.4f}   {1 / t:11.1f}")

# sensitivity drops in the dark
for bg in (1.0, 10.0, 100.0):
    print(f"4 cpd at {bg:5.0f} cd/m^2: threshold {threshold(4, bg):.4f}")
