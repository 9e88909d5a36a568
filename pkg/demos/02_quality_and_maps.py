"""Quality score and visibility maps for a noisy photograph.

Adds noise of growing strength to a photo shown on a 200 cd/m^2 sRGB
display and prints the predicted JOD and detection probability. The
side-by-side visibility map and the contrast distortion maps of the last
step are saved as heat maps (blue = invisible, red = certainly visible).

    python demos/02_quality_and_maps.py [out_dir]
"""

import sys
from pathlib import Path

import numpy as np

from hdrvdp import DisplayParams, RunConfig, default_calibration, load_image, run_task, write_heatmap
from hdrvdp.imgio import DisplayEncodedFrame

here = Path(__file__).resolve().parent
out = Path(sys.argv[1]) if len(sys.argv) > 1 else here / "out"
out.mkdir(exist_ok=True)

ref = load_image(here.parent / "tests" / "data" / "astronaut.png", "srgb")
display = DisplayParams(eotf="gamma22_srgb", peak_luminance=200.0)
noise = np.random.default_rng(0).normal(size=ref.data.shape)


def run(task, test):
    cfg = RunConfig(task=task, ppd=60, display=display)
    return run_task(test, ref, cfg, default_calibration(task))


print(" noise    JOD   P(detect)")
for amp in (0.0, 0.005, 0.01, 0.02, 0.04):
    test = DisplayEncodedFrame(np.clip(ref.data + amp * noise, 0, 1), "srgb")
    print(f"{amp:6.3f}  {run('quality', test).score:5.2f}   {run('detection', test).score:.3f}")

# maps for the strongest noise level
write_heatmap(run("side-by-side", test).payload, out / "visibility.png")
for name, plane in run("civdm", test).maps().items():
    write_heatmap(plane, out / f"civdm_{name}.png")
print(f"\nheat maps written to {out}")
