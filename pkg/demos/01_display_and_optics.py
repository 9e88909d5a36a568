"""From pixel values to what reaches the retina.

Walks through the first half of the model: the PQ display, the light the
room reflects off the screen, glare inside the eye, and how the pupil of
an older observer lets in less light.

    python demos/01_display_and_optics.py
"""

import numpy as np

from hdrvdp import DisplayParams, apply_display_model, default_calibration, pq_inverse_eotf
from hdrvdp.imgio import DisplayEncodedFrame
from hdrvdp.optics import OpticsConfig, apply_glare, build_glare_filter, pupil_diameter

# PQ is absolute: a code value always means the same luminance
for v in (0.0, 0.25, 0.5, 0.75, 1.0):
    print(f"PQ {v:4.2f} -> {float(pq_inverse_eotf(v)):9.3f} cd/m^2")

# a black frame is not black once 200 lux fall on a screen reflecting 0.5%
black = DisplayEncodedFrame(np.zeros((8, 8, 3)), "pq")
lum = apply_display_model(black, DisplayParams()).luminance
print(f"\nblack frame under room light: {lum.mean():.4f} cd/m^2")

# a small 1000 cd/m^2 lamp on a dark background, viewed at 60 pixels/degree
scene = np.full((128, 128, 3), 0.1)
scene[60:68, 60:68] = 0.75
radiance = apply_display_model(DisplayEncodedFrame(scene, "pq"), DisplayParams(ambient=0))
optics = default_calibration("quality").optics_params

print("\nveil of light 10 px from the lamp edge (cd/m^2):")
for mode in ("mtf", "cie99"):
    for age in (24, 70):
        filt = build_glare_filter(OpticsConfig(mode, age, 60), 128, 128, optics)
        seen = apply_glare(radiance, filt).luminance
        print(f"  {mode:5s} age {age}: {seen[64, 78]:.3f}  (mean kept: {seen.mean() / radiance.luminance.mean():.12f})")

# senile miosis: same scene, smaller pupil
print("\npupil diameter in mm at 100 cd/m^2:")
for age in (20, 40, 60, 80):
    print(f"  age {age}: {float(pupil_diameter(100.0, age)):.2f}")
