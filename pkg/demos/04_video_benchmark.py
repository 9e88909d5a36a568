"""Scoring a short video and correlating scores with opinion scores.

Builds a few synthetic clips with increasing noise, scores every 10th
frame of each clip, averages per clip and compares the result with
made-up mean opinion scores using rank and linear correlation.

    python demos/04_video_benchmark.py
"""

import numpy as np

from hdrvdp import BenchmarkRow, RunConfig, default_calibration, plcc, run_video, srocc
from hdrvdp.display import pq_eotf_inverse_check
from hdrvdp.imgio import DisplayEncodedFrame

rng = np.random.default_rng(7)
shape = (96, 96)
base = np.exp(rng.normal(np.log(120), 0.6, shape))


def frame(lum):
    return DisplayEncodedFrame(pq_eotf_inverse_check(np.repeat(lum[..., None], 3, -1)), "pq")


cfg = RunConfig(task="quality", ppd=40, frame_step=10)
calib = default_calibration("quality")
rows = []
for clip, (noise, mos) in enumerate([(0.0, 9.8), (0.01, 8.9), (0.03, 7.5), (0.06, 6.1), (0.1, 4.0)]):
    drift = np.linspace(0, 1, 31)
    ref = [frame(base * (1 + 0.05 * d)) for d in drift]
    test = [frame(base * (1 + 0.05 * d) * (1 + noise * rng.normal(size=shape))) for d in drift]
    res = run_video(test, ref, cfg, calib)
    print(f"clip {clip}: frames {res.frame_indices} JOD {[round(j, 2) for j in res.per_frame]} -> {res.score:.2f}")
    rows.append(BenchmarkRow(f"clip{clip}", res.score, mos))

print(f"\nSROCC {srocc(rows):.3f}  PLCC {plcc(rows):.3f}")
