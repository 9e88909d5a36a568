"""Visual difference prediction for HDR and SDR images and video.

Typical use::

    from hdrvdp import RunConfig, default_calibration, load_image, run_task

    cfg = RunConfig(task="quality", ppd=60)
    res = run_task(load_image("test.png"), load_image("ref.png"), cfg, default_calibration("quality"))
    print(res.score)
"""

from .calibration import CalibrationError, CalibrationSet, default_calibration, load_calibration
from .config import RunConfig
from .display import DisplayParams, apply_display_model, pq_eotf_inverse_check, pq_inverse_eotf
from .imgio import DisplayEncodedFrame, load_image, write_heatmap
from .pipeline import TaskResult, run_task, run_video
from .stats import BenchmarkRow, plcc, srocc

__version__ = "0.1.0"

__all__ = [
    "BenchmarkRow",
    "CalibrationError",
    "CalibrationSet",
    "DisplayEncodedFrame",
    "DisplayParams",
    "RunConfig",
    "TaskResult",
    "apply_display_model",
    "default_calibration",
    "load_calibration",
    "load_image",
    "plcc",
    "pq_eotf_inverse_check",
    "pq_inverse_eotf",
    "run_task",
    "run_video",
    "srocc",
    "write_heatmap",
]
